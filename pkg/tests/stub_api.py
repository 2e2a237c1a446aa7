"""Thread-local HTTP stub that mimics the remote search/followers endpoints.

Supports scripted faults (429 with retry-after, 5xx, connection reset) so the
client's recovery behavior can be exercised against real HTTP semantics.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse


class StubApi:
    def __init__(self, token="secret-token"):
        self.token = token
        self.search_pages = []  # list of page dicts; meta.next_token chains them
        self.users = {}  # username -> user object
        self.followers = {}  # user id -> list of page dicts
        self.faults = []  # {"path": substr, "status": int, "retry_after": str?} or {"path":..., "reset": True}
        self.requests = []  # (path, params dict)
        self.lock = threading.Lock()

    def pop_fault(self, path):
        with self.lock:
            for i, fault in enumerate(self.faults):
                if fault.get("path", "") in path:
                    return self.faults.pop(i)
        return None


def _make_handler(stub: StubApi):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _json(self, status, payload, headers=()):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("content-type", "application/json")
            self.send_header("content-length", str(len(body)))
            for key, value in headers:
                self.send_header(key, value)
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            parsed = urlparse(self.path)
            params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
            with stub.lock:
                stub.requests.append((parsed.path, params))

            fault = stub.pop_fault(f"{parsed.path}?{parsed.query}")
            if fault is not None:
                if fault.get("reset"):
                    self.connection.close()
                    return
                if fault.get("garbage"):
                    body = b"<html>not json</html>"
                    self.send_response(200)
                    self.send_header("content-type", "application/json")
                    self.send_header("content-length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                headers = []
                if "retry_after" in fault:
                    headers.append(("retry-after", str(fault["retry_after"])))
                self._json(fault["status"], {"title": "injected"}, headers)
                return

            auth = self.headers.get("authorization", "")
            if auth != f"Bearer {stub.token}":
                self._json(401, {"title": "Unauthorized"})
                return

            if parsed.path == "/2/tweets/search/recent":
                if "query" not in params or params["query"].startswith("!"):
                    self._json(400, {"title": "Invalid Request"})
                    return
                token = params.get("next_token")
                index = int(token[1:]) if token else 0
                if index >= len(stub.search_pages):
                    self._json(200, {"meta": {"result_count": 0}})
                    return
                page = json.loads(json.dumps(stub.search_pages[index]))
                since = params.get("since_id")
                if since:
                    page["data"] = [t for t in page.get("data", []) if int(t["id"]) > int(since)]
                self._json(200, page)
                return

            if parsed.path.startswith("/2/users/by/username/"):
                username = parsed.path.rsplit("/", 1)[-1]
                user = stub.users.get(username)
                if user is None:
                    self._json(404, {"title": "Not Found Error"})
                    return
                self._json(200, {"data": user})
                return

            if parsed.path.startswith("/2/users/") and parsed.path.endswith("/followers"):
                user_id = parsed.path.split("/")[3]
                pages = stub.followers.get(user_id)
                if pages is None:
                    self._json(404, {"title": "Not Found Error"})
                    return
                token = params.get("pagination_token")
                index = int(token[1:]) if token else 0
                if index >= len(pages):
                    self._json(200, {"meta": {"result_count": 0}})
                    return
                self._json(200, pages[index])
                return

            self._json(404, {"title": "Not Found Error"})

    return Handler


class StubServer:
    def __init__(self, stub: StubApi):
        self.stub = stub
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _make_handler(stub))
        self.thread = threading.Thread(
            target=lambda: self.server.serve_forever(poll_interval=0.02), daemon=True
        )

    @property
    def base_url(self):
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
