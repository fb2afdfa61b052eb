"""Independent reference implementations used to cross-check the library.

These deliberately share no code with the package: the BPE oracle recounts
every pair from scratch each iteration, and the F1 oracle works from an
explicit confusion matrix.
"""

from collections import Counter


def oracle_bpe_merges(texts, vocab_size, special_tokens, marker="</w>",
                      min_pair_freq=2):
    """From-scratch-recount BPE trainer; returns the merge list."""
    special = set(special_tokens)
    word_freqs = Counter()
    for text in texts:
        for word in text.split():
            if word not in special:
                word_freqs[word] += 1
    words = []
    for word in sorted(word_freqs):
        symbols = list(word[:-1]) + [word[-1] + marker]
        words.append((symbols, word_freqs[word]))

    vocab = set(special)
    for symbols, _ in words:
        vocab.update(symbols)
    n_vocab = len(special) + len(vocab - special)

    merges = []
    while n_vocab < vocab_size:
        counts = Counter()
        for symbols, freq in words:
            for pair in zip(symbols, symbols[1:]):
                counts[pair] += freq
        candidates = [
            (pair, c) for pair, c in counts.items()
            if c >= min_pair_freq and pair[0] + pair[1] not in special
        ]
        if not candidates:
            break
        best = min(candidates, key=lambda item: (-item[1], item[0]))[0]
        merges.append(best)
        merged = best[0] + best[1]
        if merged not in vocab:
            vocab.add(merged)
            n_vocab += 1
        new_words = []
        for symbols, freq in words:
            out = []
            i = 0
            while i < len(symbols):
                if (i + 1 < len(symbols) and symbols[i] == best[0]
                        and symbols[i + 1] == best[1]):
                    out.append(merged)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            new_words.append((out, freq))
        words = new_words
    return merges


def confusion_matrix_f1(predictions, gold, label_set):
    """Weighted F1 computed from the full confusion matrix."""
    matrix = {}
    for p, g in zip(predictions, gold):
        matrix[(g, p)] = matrix.get((g, p), 0) + 1
    total = len(gold)
    weighted = 0.0
    for label in label_set:
        row = sum(c for (g, _), c in matrix.items() if g == label)
        col = sum(c for (_, p), c in matrix.items() if p == label)
        tp = matrix.get((label, label), 0)
        if row == 0:
            continue
        precision = tp / col if col else 0.0
        recall = tp / row
        if precision + recall:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
        weighted += f1 * (row / total)
    return weighted
