from linopen import parse_system, covering_sweep
from ebbe import Timer

SYSTEMS = {
    "cubic": """
mode continuous
states 1
controls 1
eq x = 0
eq u = 0
f1 = u1^3
""",
    "planar": """
mode continuous
states 2
controls 1
eq x = 0 0
eq u = 0
f1 = x1^3 + x2
f2 = u1
""",
}

RADII = [0.1, 0.05, 0.025, 0.0125]

for name, text in SYSTEMS.items():
    system = parse_system(text)

    with Timer(name):
        sweep = covering_sweep(system, RADII)

    for sample in sweep.samples:
        print(name, sample.radius, sample.modulus)
