"""
Deterministic benchmark generators.

All randomness comes from a splitmix64 stream, so a (parameters, seed) pair
produces the same graph on every platform.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import GraphConstructionError, LexiconError
from core.graph import EPSILON, Graph

MASK64 = (1 << 64) - 1


class Rng:
    """splitmix64."""

    def __init__(self, seed):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n):
        """Integer in [0, n) (modulo reduction)."""
        return self.next_u64() % n

    def uniform(self):
        """Float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def derive_seed(seed, *parts):
    rng = Rng(seed)
    value = rng.next_u64()
    for part in parts:
        rng = Rng(value ^ (part & MASK64))
        value = rng.next_u64()
    return value


def random_graph(num_nodes, degree, num_tokens, seed):
    """Uniform out-degree acceptor: node 0 starts, node V-1 accepts, destinations uniform (self-loops allowed)."""
    if num_nodes < 2 or degree < 0 or num_tokens < 1:
        raise GraphConstructionError(
            f"random_graph needs num_nodes >= 2, degree >= 0, num_tokens >= 1 "
            f"(got {num_nodes}, {degree}, {num_tokens})"
        )
    rng = Rng(seed)
    src, dst, labels = [], [], []
    for v in range(num_nodes):
        for _ in range(degree):
            src.append(v)
            dst.append(rng.below(num_nodes))
            labels.append(rng.below(num_tokens))
    return Graph.from_arrays(num_nodes, [0], [num_nodes - 1], src, dst, labels, labels,
                             np.zeros(len(src)))


def random_dag(num_nodes, max_degree, num_tokens, eps_prob, seed):
    """Acyclic variant for oracle suites: dst > src, per-node degree uniform in [0, max_degree]."""
    if num_nodes < 2 or max_degree < 0 or num_tokens < 1:
        raise GraphConstructionError(
            f"random_dag needs num_nodes >= 2, max_degree >= 0, num_tokens >= 1 "
            f"(got {num_nodes}, {max_degree}, {num_tokens})"
        )
    if not 0.0 <= eps_prob <= 1.0:
        raise GraphConstructionError(f"eps_prob must lie in [0, 1], got {eps_prob}")
    rng = Rng(seed)

    def label():
        is_eps = rng.uniform() < eps_prob
        token = rng.below(num_tokens)
        return EPSILON if is_eps else token

    src, dst, ilabels, olabels, weights = [], [], [], [], []
    for v in range(num_nodes - 1):
        for _ in range(rng.below(max_degree + 1)):
            src.append(v)
            dst.append(v + 1 + rng.below(num_nodes - 1 - v))
            ilabels.append(label())
            olabels.append(label())
            weights.append(-rng.uniform())
    return Graph.from_arrays(num_nodes, [0], [num_nodes - 1], src, dst, ilabels, olabels, weights)


@dataclass
class Lexicon:
    words: list                      # (word id, phoneme id tuple)
    phoneme_count: int
    word_symbols: Optional[list] = None
    phoneme_symbols: Optional[list] = field(default=None)

    def __len__(self):
        return len(self.words)


def _distinct_pronunciations(phoneme_count, min_len, max_len):
    return sum(phoneme_count ** n for n in range(min_len, max_len + 1))


def synthetic_lexicon(num_words, phoneme_count, min_len, max_len, seed):
    if not 1 <= min_len <= max_len:
        raise LexiconError(f"need 1 <= min_len <= max_len, got {min_len}, {max_len}")
    if phoneme_count < 1 or num_words < 0:
        raise LexiconError(f"invalid lexicon size: {num_words} words over {phoneme_count} phonemes")
    if num_words > _distinct_pronunciations(phoneme_count, min_len, max_len):
        raise LexiconError(f"cannot draw {num_words} distinct pronunciations")

    rng = Rng(seed)
    seen = set()
    words = []
    while len(words) < num_words:
        length = min_len + rng.below(max_len - min_len + 1)
        pronunciation = tuple(rng.below(phoneme_count) for _ in range(length))
        if pronunciation in seen:
            continue
        seen.add(pronunciation)
        words.append((len(words), pronunciation))
    return Lexicon(words, phoneme_count)


def load_lexicon(stream, phonemes=None):
    """
    Parse "word p1 p2 ..." lines ('#' comments).
    Word ids follow file order; phoneme ids follow first appearance unless an
    inventory is supplied, in which case unknown tokens are rejected.
    """
    phoneme_ids = {p: i for i, p in enumerate(phonemes)} if phonemes is not None else {}
    word_ids = {}
    words = []
    for line_number, raw in enumerate(stream, 1):
        fields = raw.split('#', 1)[0].split()
        if not fields:
            continue
        word, tokens = fields[0], fields[1:]
        if word in word_ids:
            raise LexiconError(f"line {line_number}: duplicate word {word!r}")
        if not tokens:
            raise LexiconError(f"line {line_number}: word {word!r} has no pronunciation")
        pronunciation = []
        for token in tokens:
            if token not in phoneme_ids:
                if phonemes is not None:
                    raise LexiconError(f"line {line_number}: unknown phoneme {token!r}")
                phoneme_ids[token] = len(phoneme_ids)
            pronunciation.append(phoneme_ids[token])
        word_ids[word] = len(words)
        words.append((word_ids[word], tuple(pronunciation)))
    return Lexicon(words, len(phoneme_ids), list(word_ids), list(phoneme_ids))


def sample_lexicon(lex, count, seed):
    """`count` words drawn without replacement (partial Fisher-Yates); word ids are kept."""
    if count > len(lex):
        raise LexiconError(f"cannot sample {count} words from a lexicon of {len(lex)}")
    rng = Rng(seed)
    pool = list(lex.words)
    for i in range(count):
        j = i + rng.below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return Lexicon(pool[:count], lex.phoneme_count, lex.word_symbols, lex.phoneme_symbols)


def lexicon_graph(lex):
    """One shared start node and a linear chain per word; the word label sits on the chain's first arc."""
    src, dst, ilabels, olabels, accepts = [], [], [], [], []
    num_nodes = 1
    for word_id, pronunciation in lex.words:
        prev = 0
        for j, phoneme in enumerate(pronunciation):
            src.append(prev)
            dst.append(num_nodes)
            ilabels.append(phoneme)
            olabels.append(word_id if j == 0 else EPSILON)
            prev = num_nodes
            num_nodes += 1
        accepts.append(prev)
    return Graph.from_arrays(num_nodes, [0], accepts, src, dst, ilabels, olabels, np.zeros(len(src)))


def emissions_graph(num_frames, phoneme_count, seed=None, scores=None):
    """Linear acceptor: frame t -> t+1 carries one arc per phoneme weighted by score(t, p)."""
    if num_frames < 1 or phoneme_count < 1:
        raise GraphConstructionError(f"need num_frames >= 1 and phoneme_count >= 1, got {num_frames}, {phoneme_count}")
    if scores is None:
        rng = Rng(0 if seed is None else seed)
        scores = [[-rng.uniform() for _ in range(phoneme_count)] for _ in range(num_frames)]
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (num_frames, phoneme_count):
        raise GraphConstructionError(
            f"score table has shape {scores.shape}, expected ({num_frames}, {phoneme_count})"
        )
    src = np.repeat(np.arange(num_frames), phoneme_count)
    labels = np.tile(np.arange(phoneme_count), num_frames)
    return Graph.from_arrays(num_frames + 1, [0], [num_frames], src, src + 1, labels, labels, scores.ravel())
