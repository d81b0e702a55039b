"""Score system outputs against references with ROUGE-1/2/L.

Shows per-example scores, corpus means on the x100 scale, the DUC-style
byte cap, and the two baselines evaluations usually report next to a
system: PREFIX (the first 75 bytes of the source) and INPUT (the full
source sentence).
"""

from ibsum import EvalConfig, evaluate_corpus, rouge_l, rouge_n
from ibsum.rouge import byte_cap_text

outputs = [
    "storm knocks out power across region",
    "repair crews work through the night",
]
reference_sets = [
    ["storm cuts power to thousands", "storm knocks out power in region"],
    ["crews repair lines overnight", "repair work continues through night"],
]
sources = [
    "a powerful storm knocked out power to thousands of homes across the region",
    "utility repair crews worked through the night to restore the damaged lines",
]

single = rouge_n("storm cuts power".split(), ["storm cuts power to thousands".split()], 1)
print(f"one candidate, unigrams: p={single.precision:.3f} r={single.recall:.3f} f1={single.f1:.3f}")
lcs = rouge_l("crews repair lines".split(), ["repair crews fixed the lines".split()])
print(f"one candidate, LCS     : p={lcs.precision:.3f} r={lcs.recall:.3f} f1={lcs.f1:.3f}")

cfg = EvalConfig.duc()  # 75-byte candidate cap, best reference, case folding
report = evaluate_corpus(outputs, reference_sets, cfg)
print("\nsystem means (x100):")
for metric, values in report.means.items():
    print(f"  {metric}: " + " ".join(f"{k}={v:.2f}" for k, v in values.items()))

prefix_outputs = [byte_cap_text(s, 75) for s in sources]
for label, candidates in (("PREFIX", prefix_outputs), ("INPUT", sources)):
    means = evaluate_corpus(candidates, reference_sets, cfg).means
    print(f"{label:6s} rouge1 f1 = {means['rouge1']['f1']:.2f}")
