"""Regenerates qr_reference.json with segno.

segno pads a byte-aligned stream with a whole extra zero byte before the pad
codewords; the patch below restores standard behaviour (no padding bits when
already aligned). Everything else comes from segno unchanged.
"""
import json
import segno
from segno import encoder

_orig = encoder.write_padding_bits


def _padding(buff, version, length):
    if length % 8:
        _orig(buff, version, length)


encoder.write_padding_bits = _padding

CAPACITY = {(1, "L"): 17, (1, "M"): 14, (2, "L"): 32, (2, "M"): 26, (3, "L"): 53, (3, "M"): 42}
BASE = "HCTIS1|ENG|2|N11|S1042|campus-ar|reference-symbols-0123456789"

out = []
for v in (1, 2, 3):
    for lvl in ("L", "M"):
        for mask in range(8):
            # Alternate between a short payload and one at full capacity.
            n = CAPACITY[v, lvl] if mask % 2 else CAPACITY[v, lvl] // 2
            p = BASE[:n]
            q = segno.make(p, version=v, error=lvl.lower(), mask=mask, mode="byte",
                           micro=False, boost_error=False)
            assert (q.version, q.error, q.mask) == (v, lvl, mask)
            rows = ["".join("#" if b else "." for b in row) for row in q.matrix]
            out.append(dict(version=v, level=lvl, mask=mask, payload=p, rows=rows))

def n3(matrix):
    """Finder-like penalty checked at every offset.

    segno resumes its search 7 modules after a hit and so misses a second
    pattern overlapping the first; apart from that this follows segno's rule.
    """
    size = len(matrix)
    core = [1, 0, 1, 1, 1, 0, 1]
    lines = [list(r) for r in matrix] + [[matrix[j][i] for j in range(size)] for i in range(size)]
    score = 0
    for line in lines:
        for s in range(size - 6):
            if line[s:s + 7] == core and (not any(line[max(s - 4, 0):s])
                                          or not any(line[s + 7:s + 11])):
                score += 40
    return score


# Penalty scores of every finished masked symbol, for checking automatic mask
# choice. segno's own automatic choice is not used: it scores the symbol
# before the format information is drawn.
for v in (1, 2, 3):
    for lvl in ("L", "M"):
        # Only lengths for which v is the smallest fitting version.
        low = CAPACITY[v - 1, lvl] + 1 if v > 1 else 1
        for n in range(low, CAPACITY[v, lvl] + 1, 2):
            p = BASE[:n]
            scores = []
            for mask in range(8):
                q = segno.make(p, version=v, error=lvl.lower(), mask=mask, mode="byte",
                               micro=False, boost_error=False)
                m = [bytearray(r) for r in q.matrix]
                n1, n2, _, n4 = encoder.mask_scores(m, len(m), len(m))
                scores.append(n1 + n2 + n3(m) + n4)
            out.append(dict(version=v, level=lvl, payload=p, penalties=scores))

with open("qr_reference.json", "w") as f:
    json.dump(out, f, indent=1)
    f.write("\n")
