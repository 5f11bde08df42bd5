#!/usr/bin/env python3
"""Generate the synthetic pipeline fixture in data/synthetic.

60 articles over 5 topics with 25 planted two-step chains. Each chain has
its own nonce vocabulary, and the effect of the earlier pair is repeated
verbatim as the cause of the later one. Output is deterministic.
"""

import argparse
import datetime
import json
import pathlib
import random

TOPICS = [
    ("ENV", "Environment"),
    ("FIN", "Finance"),
    ("HLT", "Health"),
    ("POL", "Politics"),
    ("TEC", "Technology"),
]
CATEGORIES = [
    ("Nature", ["ENV"], ["climate", "weather"]),
    ("Economy", ["FIN", "TEC"], ["markets", "industry"]),
    ("Society", ["HLT", "POL"], ["welfare", "government"]),
]
N_ARTICLES = 60
N_CHAINS = 25
START = datetime.date(2019, 1, 1)
STEP_DAYS = 12

SYLLABLES = ["ka", "lo", "mi", "ren", "sto", "vu", "zel", "dri", "pam", "qua", "tor", "bix", "fen", "gly", "hon"]


def nonce_words(rng, n, used):
    words = []
    while len(words) < n:
        w = "".join(rng.choice(SYLLABLES) for _ in range(3))
        if w not in used:
            used.add(w)
            words.append(w)
    return words


def filler_sentence(rng, vocab, k=6):
    words = [rng.choice(vocab) for _ in range(k)]
    return " ".join(words).capitalize() + "."


def topical_paragraph(rng, vocab, sentences=3):
    return " ".join(filler_sentence(rng, vocab) for _ in range(sentences))


def build(seed):
    rng = random.Random(seed)
    used = set()
    vocab = {code: nonce_words(rng, 30, used) for code, _ in TOPICS}
    codes = [code for code, _ in TOPICS]

    # chain k: past pair in article k, current pair in a later article whose
    # primary topic differs from the past one
    causal = {n: [] for n in range(N_ARTICLES)}
    for k in range(N_CHAINS):
        block, src = divmod(k, 5)
        dst = (src + 1 + block % 4) % 5
        past, current = k, 30 + 5 * block + dst
        first, shared, last = (" ".join(nonce_words(rng, 2, used)) for _ in range(3))
        causal[past].append(f"{first.capitalize()} leads to {shared}.")
        causal[current].append(f"{shared.capitalize()} leads to {last}.")

    articles = []
    for n in range(N_ARTICLES):
        primary = codes[n % 5]
        topics = [primary]
        if n % 7 == 3:
            topics.append(codes[(n + 2) % 5])
        if n in (27, 28):
            topics += [codes[(n + 1) % 5], codes[(n + 3) % 5]]
        paragraphs = []
        for sentence in causal[n]:
            lead = filler_sentence(rng, vocab[primary])
            tail = filler_sentence(rng, vocab[primary])
            paragraphs.append(f"{lead} {sentence} {tail}")
        for code in topics:
            paragraphs.append(topical_paragraph(rng, vocab[code]))
        date = START + datetime.timedelta(days=STEP_DAYS * n)
        articles.append(
            {
                "id": f"syn-{n:03d}",
                "date": date.isoformat(),
                "title": f"Synthetic report {n}",
                "body": "\n\n".join(paragraphs),
                "topics": sorted(topics),
            }
        )
    return articles


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path(__file__).parent.parent / "data" / "synthetic")
    parser.add_argument("--seed", type=int, default=1729)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with open(args.out / "corpus.jsonl", "w", encoding="utf-8") as f:
        for a in build(args.seed):
            f.write(json.dumps(a, ensure_ascii=False, sort_keys=True) + "\n")
    with open(args.out / "topics.txt", "w", encoding="utf-8") as f:
        for code, label in TOPICS:
            f.write(f"{code}\t{label}\n")
    with open(args.out / "categories.tsv", "w", encoding="utf-8") as f:
        f.write("# category\ttopics\tkeywords\n")
        for name, codes, keywords in CATEGORIES:
            f.write(f"{name}\t{','.join(codes)}\t{','.join(keywords)}\n")
    with open(args.out / "pipeline.conf", "w", encoding="utf-8") as f:
        f.write(
            "# Synthetic fixture: 25 planted chains across 5 topics.\n"
            "corpus = corpus.jsonl\n"
            "topics = topics.txt\n"
            "categories = categories.tsv\n"
            "lexicon = en\n"
            "threshold = 0.7\n"
            "format = dot\n"
        )


if __name__ == "__main__":
    main()
