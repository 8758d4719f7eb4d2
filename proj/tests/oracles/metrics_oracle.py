# Copyright 2026 The natkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reference scores for the frozen metric cases in test_metrics.cpp.

Requires sacrebleu 2.x. Run: python3 metrics_oracle.py [FIXTURE_DIR]
With a directory argument the seeded random corpus is (re)written there as
random.hyp / random.ref.
"""

import os
import random
import sys

from sacrebleu.metrics import BLEU, CHRF, TER

WORDS = ["the", "a", "cat", "dog", "sat", "on", "mat", "runs", "fast", "slow",
         "über", "café", "x", "y", "z", "it's", "don't", "3.5", "100", "Hello"]
PUNCT = [",", ".", "!", "?", ";", ":", "-", "--", "(", ")", "\"", "'", "%", "$"]


def random_corpus(seed=20261016, n=200):
    rng = random.Random(seed)
    hyps, refs = [], []
    for _ in range(n):
        ref = []
        for _ in range(rng.randint(1, 30)):
            tok = rng.choice(WORDS)
            if rng.random() < 0.2:
                tok = tok + rng.choice(PUNCT)
            ref.append(tok)
        hyp = list(ref)
        for _ in range(rng.randint(0, 6)):
            op = rng.random()
            if op < 0.3 and hyp:
                hyp[rng.randrange(len(hyp))] = rng.choice(WORDS)
            elif op < 0.5 and hyp:
                del hyp[rng.randrange(len(hyp))]
            elif op < 0.7:
                hyp.insert(rng.randint(0, len(hyp)), rng.choice(WORDS))
            elif len(hyp) > 3:
                i = rng.randrange(len(hyp) - 2)
                block = hyp[i:i + 2]
                del hyp[i:i + 2]
                hyp.insert(rng.randint(0, len(hyp)), block[0] + " " + block[1])
        hyps.append(" ".join(hyp))
        refs.append(" ".join(ref))
    return hyps, refs

CASES = {
    "cat": (["the cat sat on mat"], ["the cat sat on the mat"]),
    "chars": (["abcd"], ["abce"]),
    "shift": (["b a c d"], ["a b c d"]),
    "mixed": (
        [
            "Hello, world! This is a test.",
            "The quick brown fox jumps over the lazy dog",
            "naïve café résumé",
            "a a a a",
            "",
            "It's 3.5% of $100 -- right?",
        ],
        [
            "Hello world, this is the test.",
            "A quick brown fox jumped over a lazy dog.",
            "naive cafe résumé",
            "a b a b a",
            "nothing here",
            "It is 3.5 % of $ 100 - right ?",
        ],
    ),
    "short": (["x y", "z"], ["x y z w v", "z z z"]),
}


def main():
    hyps, refs = random_corpus()
    CASES["random"] = (hyps, refs)
    if len(sys.argv) > 1:
        for ext, lines in (("hyp", hyps), ("ref", refs)):
            with open(os.path.join(sys.argv[1], "random." + ext), "w", encoding="utf-8") as f:
                f.write("\n".join(lines) + "\n")
    for name, (hyps, refs) in CASES.items():
        bleu = BLEU().corpus_score(hyps, [refs]).score
        chrf = CHRF(word_order=2).corpus_score(hyps, [refs]).score
        ter = TER(case_sensitive=True).corpus_score(hyps, [refs]).score
        print(f"{name}\tbleu={bleu!r}\tchrfpp={chrf!r}\tter={ter!r}")


if __name__ == "__main__":
    main()
