import pytest

from agora.config import load_config
from agora.errors import ConfigError


class TestDefaults:
    def test_no_file(self):
        config = load_config(env={})
        assert config.store.path == "./agora-store"
        assert config.api.token_env == "AGORA_BEARER_TOKEN"
        assert config.collect.page_size == 100
        assert config.collect.max_retries == 5
        assert config.polarize.k_top_fraction == 0.05
        assert config.polarize.walks == 100_000
        assert config.layout.iterations == 50
        assert config.share.token_env == "AGORA_SHARE_TOKEN"


class TestFile:
    def test_file_overrides(self, tmp_path):
        path = tmp_path / "agora.toml"
        path.write_text(
            "[store]\npath = '/tmp/elsewhere'\n[collect]\npage_size = 25\n"
            "[layout]\nseed = 7\nuse_weights = true\n"
        )
        config = load_config(path, env={})
        assert config.store.path == "/tmp/elsewhere"
        assert config.collect.page_size == 25
        assert config.layout.seed == 7
        assert config.layout.use_weights is True

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "agora.toml"
        path.write_text("[nope]\nx = 1\n")
        with pytest.raises(ConfigError, match="nope"):
            load_config(path, env={})

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "agora.toml"
        path.write_text("[collect]\npage_sizes = 10\n")
        with pytest.raises(ConfigError, match="page_sizes"):
            load_config(path, env={})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml", env={})

    def test_bad_toml(self, tmp_path):
        path = tmp_path / "agora.toml"
        path.write_text("[store\n")
        with pytest.raises(ConfigError):
            load_config(path, env={})

    def test_bad_value_type(self, tmp_path):
        path = tmp_path / "agora.toml"
        path.write_text("[collect]\npage_size = 'many'\n")
        with pytest.raises(ConfigError):
            load_config(path, env={})


class TestEnvOverrides:
    def test_env_beats_file(self, tmp_path):
        path = tmp_path / "agora.toml"
        path.write_text("[collect]\npage_size = 25\n")
        config = load_config(path, env={"AGORA_COLLECT_PAGE_SIZE": "7"})
        assert config.collect.page_size == 7

    def test_env_type_coercion(self):
        config = load_config(env={
            "AGORA_LAYOUT_USE_WEIGHTS": "true",
            "AGORA_POLARIZE_K_TOP_FRACTION": "0.1",
        })
        assert config.layout.use_weights is True
        assert config.polarize.k_top_fraction == 0.1

    def test_bad_env_value(self):
        with pytest.raises(ConfigError):
            load_config(env={"AGORA_COLLECT_PAGE_SIZE": "lots"})
