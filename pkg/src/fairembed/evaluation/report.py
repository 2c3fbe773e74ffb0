"""Structured metrics reports and sweep curve tables."""
import json
from dataclasses import asdict, dataclass, field


@dataclass
class MetricsReport:
    metadata: dict = field(default_factory=dict)   # seed, lambda, mask policy
    leakage: dict = field(default_factory=dict)    # attr -> score record
    baselines: dict = field(default_factory=dict)  # attr -> majority/random
    task: dict = field(default_factory=dict)       # name/value/split/n
    bias: dict = field(default_factory=dict)       # attr -> score
    heldout: dict = field(default_factory=dict)    # held-out leakage table

    def __post_init__(self):
        for attr, rec in self.leakage.items():
            s = rec["score"]
            if not 0.0 <= s <= 1.0:
                raise ValueError(f"leakage score for {attr!r} outside [0,1]")

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def to_text(self):
        lines = []
        meta = " ".join(f"{k}={v}" for k, v in sorted(self.metadata.items()))
        lines.append(f"run: {meta}")
        if self.task:
            lines.append(f"task: {self.task['name']} = {self.task['value']:.4f}"
                         f"  [{self.task.get('split', '?')}, "
                         f"n={self.task.get('n', '?')}]")
        if self.leakage:
            lines.append("")
            lines.append(f"{'attribute':<16}{'metric':<10}{'leakage':>9}"
                         f"{'majority':>10}{'random':>9}{'n_test':>8}")
            for attr, rec in self.leakage.items():
                base = self.baselines.get(attr, {})
                lines.append(
                    f"{attr:<16}{rec['metric']:<10}{rec['score']:>9.3f}"
                    f"{base.get('majority', float('nan')):>10.3f}"
                    f"{base.get('random', float('nan')):>9.3f}"
                    f"{rec.get('n_test', 0):>8d}")
        if self.bias:
            lines.append("")
            lines.append("prediction bias:")
            for attr, score in self.bias.items():
                lines.append(f"  {attr:<16}{score:.4f}")
        if self.heldout:
            lines.append("")
            lines.append(f"held-out combinations: mean leakage "
                         f"{self.heldout['heldout_mean']:.3f} vs seen "
                         f"{self.heldout['seen_mean']:.3f} "
                         f"(gap {self.heldout['gap']:+.3f})")
        return "\n".join(lines) + "\n"


def write_curves(rows, out_dir):
    """rows: list of {"lambda": x, "metric": name, "value": v}. Writes one
    comma-separated table per metric with a header row."""
    from pathlib import Path
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_metric = {}
    for row in rows:
        by_metric.setdefault(row["metric"], []).append(row)
    paths = []
    for metric, mrows in sorted(by_metric.items()):
        safe = metric.replace("/", "_").replace(" ", "_")
        path = out_dir / f"curve_{safe}.csv"
        with open(path, "w") as fh:
            fh.write("lambda,metric,value\n")
            for row in mrows:
                fh.write(f"{row['lambda']},{row['metric']},{row['value']}\n")
        paths.append(path)
    return paths
