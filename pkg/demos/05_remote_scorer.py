"""
Scoring actions through an HTTP model server
============================================

``remote_score`` posts ``{"theory", "actions"}`` and expects
``{"scores": {id: number}}`` back.  A toy server stands in for a real model
here; it rates permissibility by looking for a few words.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from mec import Action, DecisionSituation, TheoryKind, TheorySpec, deontology_prompt, run_mec
from mec.evaluators import remote_score

BAD_WORDS = ("steal", "lie", "keep")


class ToyDeontologyModel(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        scores = {}
        for action in body["actions"]:
            prompt = deontology_prompt(action["text"])
            scores[action["id"]] = 0.1 if any(w in prompt for w in BAD_WORDS) else 0.9
        data = json.dumps({"scores": scores}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


server = ThreadingHTTPServer(("127.0.0.1", 0), ToyDeontologyModel)
threading.Thread(target=server.serve_forever, daemon=True).start()
url = f"http://127.0.0.1:{server.server_address[1]}/score"

actions = [Action("return", "return the wallet"), Action("keep", "keep the wallet")]
deontology = remote_score(url, "deontology", actions, timeout=5)
print("remote scores:", deontology.to_dict())

situation = DecisionSituation(
    actions=actions,
    theories=[TheorySpec("deontology", TheoryKind.ORDINAL, 1.0),
              TheorySpec("utilitarianism", TheoryKind.CARDINAL_COMPARABLE, 0.6)],
    score_tables={"deontology": deontology,
                  "utilitarianism": {"return": 0.2, "keep": 0.5}},
)
print("selected:", run_mec(situation).selected)
server.shutdown()
