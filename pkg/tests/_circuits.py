"""Random well-formed circuit programs."""

from fractions import Fraction

from _gen import small_fraction


def random_program(r, with_expect: bool = True, allow_feedback: bool = True) -> str:
    n_params = r.randint(2, 5)
    params = [f"p{i}" for i in range(n_params)]
    n_genes = r.randint(1, 4)
    genes = [f"G{i}" for i in range(n_genes)]
    lines = []
    for p in params:
        line = f"param {p}"
        if r.random() < 0.5:
            line += " positive"
        if r.random() < 0.7:
            v = Fraction(r.randint(1, 9), r.randint(1, 4))
            line += f" = {'-' if r.random() < 0.1 else ''}{v}"
        lines.append(line)
    lines.append("input U")
    for g in genes:
        lines.append(f"gene {g} degrade {r.choice(params)}")
    for i, g in enumerate(genes):
        sources = ["U"] + genes[:i]
        for src in r.sample(sources, r.randint(1, min(2, len(sources)))):
            lines.append(f"{r.choice(['activate', 'repress'])} {g} by {src} gain {r.choice(params)}")
    if allow_feedback and r.random() < 0.4:
        g = r.choice(genes)
        lines.append(f"feedback {g} to {g} gain {r.choice(params)} sign {r.choice('+-')}")
    lines.append(f"output {genes[-1]}")
    if with_expect and r.random() < 0.3:
        lines.append(f"expect ({r.choice(params)})/(s + {small_fraction(r, nonzero=True)})")
    r.shuffle(lines)
    return "\n".join(lines) + "\n"
