"""Seeded synthetic text that mimics English letter and word statistics.

Used when no real corpus is at hand. Words come from a small seed vocabulary
plus pseudo-words drawn from a letter-trigram model of it; word frequencies
follow a Zipf law, and the output is wrapped into lines of about 72 bytes.
"""

from __future__ import annotations

from collections import Counter, defaultdict

import numpy as np

SEED_TEXT = """
It was late in the autumn when the travellers reached the old town by the river.
The streets were narrow and quiet, and most of the houses had their shutters
closed against the wind. An old man who kept the inn at the corner of the market
told them that the bridge had been washed away in the spring floods, and that
nobody had found the money to build another one. If they wished to cross the
water they would have to wait for the ferry, which came only twice a week and
never when the weather was bad. The travellers looked at each other and said
nothing for a while. They had walked for many days through the hills, sleeping
in barns and under hedges, and they had hoped to be in the city before the first
snow. Now it seemed that they would have to stay where they were. The younger of
the two asked whether there was any work to be had in the town, for their money
was nearly gone. The innkeeper thought about this for some time before he
answered. There was a mill further up the valley, he said, where the owner was
always looking for strong hands, though the pay was poor and the hours were
long. There was also the school, which needed someone to mend the roof and
paint the windows before the winter came. In the evening they sat by the fire
and listened to the people talking about the harvest, the price of grain, the
new road that was going to be built through the forest, and the letters that
had come from children who had gone away to work in the factories of the north.
Everyone agreed that things were not what they had been, but nobody could say
exactly what had changed or when it had begun. Some blamed the government and
some blamed the railway, while others said that it was simply the way of the
world and there was no use in complaining about it. The travellers went up to
bed early, and in the morning they found that the river had risen again during
the night. A boat was tied to a post near the water, and a woman was standing
beside it with a basket of bread and apples, looking out across the grey water
as though she were waiting for someone who had promised to come back. Later
that week the weather turned cold and clear, and the children of the village
went down to the meadow to watch the geese flying south in long uneven lines.
"""


def _words(text: str) -> list[str]:
    return [w.strip(".,").lower() for w in text.split() if w.strip(".,")]


def _pseudo_words(seed_words: list[str], count: int, rng: np.random.Generator) -> list[str]:
    trans: dict[str, Counter] = defaultdict(Counter)
    for w in seed_words:
        padded = "^^" + w + "$"
        for i in range(2, len(padded)):
            trans[padded[i - 2 : i]][padded[i]] += 1
    table = {}
    for ctx, cnt in trans.items():
        letters = list(cnt)
        p = np.array([cnt[c] for c in letters], dtype=float)
        table[ctx] = (letters, p / p.sum())
    out: set[str] = set(seed_words)
    words = []
    while len(words) < count:
        ctx, w = "^^", ""
        while len(w) < 14:
            letters, p = table[ctx]
            c = letters[rng.choice(len(letters), p=p)]
            if c == "$":
                break
            w += c
            ctx = ctx[1] + c
        if len(w) > 1 and w not in out:
            out.add(w)
            words.append(w)
    return words


def synth_english(n_bytes: int, seed: int = 0, vocabulary: int = 20000) -> bytes:
    """Generate about ``n_bytes`` of English-like text (exactly ``n_bytes`` returned)."""
    rng = np.random.default_rng(seed)
    seed_words = _words(SEED_TEXT)
    ranked = [w for w, _ in Counter(seed_words).most_common()]
    vocab = ranked + _pseudo_words(seed_words, max(0, vocabulary - len(ranked)), rng)
    weights = 1.0 / np.arange(1, len(vocab) + 1) ** 1.05
    weights /= weights.sum()
    lower = np.array([w.encode() for w in vocab], dtype=object)
    capital = np.array([w.capitalize().encode() for w in vocab], dtype=object)
    mean_len = float(np.dot(weights, [len(w) + 1.1 for w in vocab]))
    n_words = int(n_bytes / mean_len * 1.05) + 16

    idx = rng.choice(len(vocab), size=n_words, p=weights)
    sep_draw = rng.random(n_words)
    sentence_end = sep_draw < 0.07
    comma = (sep_draw >= 0.07) & (sep_draw < 0.13)
    starts = np.concatenate(([True], sentence_end[:-1]))
    tokens = np.where(starts, capital[idx], lower[idx])
    seps = np.full(n_words, b" ", dtype=object)
    seps[sentence_end] = b". "
    seps[comma] = b", "
    body = b"".join((tokens + seps).tolist())

    arr = np.frombuffer(body, dtype=np.uint8).copy()
    spaces = np.flatnonzero(arr == ord(" "))
    line = spaces // 72
    first = np.concatenate(([False], line[1:] != line[:-1]))
    arr[spaces[first]] = ord("\n")
    data = arr.tobytes()
    while len(data) < n_bytes:
        data += data[: n_bytes - len(data)]
    return data[:n_bytes]
