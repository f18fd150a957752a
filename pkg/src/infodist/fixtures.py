"""Deterministic fixtures: prose generator and small task datasets.

Everything here is seeded and reproducible so tests and benchmarks never
depend on downloads. The prose generator composes template sentences from
word banks, giving letter and n-gram statistics near ordinary English.
"""

from __future__ import annotations

import numpy as np

_SUBJECTS = (
    "the river", "a quiet engineer", "the old library", "our neighbor", "the committee",
    "a gray cat", "the morning train", "her brother", "the village baker", "this machine",
    "the young violinist", "a tired doctor", "the garden", "the captain", "an honest clerk",
    "the lighthouse keeper", "a traveling merchant", "the night watchman", "my grandmother",
    "the apprentice",
)
_VERBS = (
    "carried", "watched", "remembered", "ignored", "followed", "repaired", "described",
    "measured", "painted", "borrowed", "promised", "refused", "discovered", "forgot",
    "welcomed", "examined", "collected", "delivered", "sketched", "questioned",
)
_OBJECTS = (
    "the letter", "a wooden box", "the broken clock", "an old map", "the evening news",
    "a pot of coffee", "the narrow bridge", "its own shadow", "the winter coat",
    "a small fortune", "the missing key", "a bundle of papers", "the garden gate",
    "the last ticket", "an empty bottle", "the fallen sign", "a jar of honey",
    "the second volume", "a silver coin", "the harbor lights",
)
_TAILS = (
    "before dawn", "without a word", "after the storm", "in early spring",
    "near the harbor", "for many years", "despite the rain", "with great care",
    "under the bridge", "by candlelight", "on market day", "against all advice",
    "at the last minute", "in plain sight", "every single day", "for no clear reason",
    "beside the old mill", "during the long winter", "between two meetings",
    "along the coast road",
)
_CONNECTORS = (
    "Meanwhile, ", "Later that week, ", "As it happened, ", "By then, ",
    "To everyone's surprise, ", "In the end, ",
)


def english_text(n_bytes: int, seed: int = 7) -> str:
    """Deterministic English-like prose of exactly ``n_bytes`` ASCII bytes."""
    if n_bytes < 0:
        raise ValueError("n_bytes must be nonnegative")
    rng = np.random.default_rng(seed)
    parts: list[str] = []
    size = 0
    while size < n_bytes:
        sent = (
            f"{_SUBJECTS[rng.integers(len(_SUBJECTS))]} "
            f"{_VERBS[rng.integers(len(_VERBS))]} "
            f"{_OBJECTS[rng.integers(len(_OBJECTS))]} "
            f"{_TAILS[rng.integers(len(_TAILS))]}"
        )
        roll = rng.random()
        if roll < 0.12:
            sent = _CONNECTORS[rng.integers(len(_CONNECTORS))] + sent
        elif roll < 0.18:
            sent = f"{sent}, or so people said"
        sent = sent[0].upper() + sent[1:] + ". "
        if rng.random() < 0.05:
            sent += f"It was {int(rng.integers(1871, 1954))}. "
        parts.append(sent)
        size += len(sent)
        if rng.random() < 0.1:
            parts.append("\n\n")
            size += 2
    return "".join(parts)[:n_bytes]


# Five diverse round-trip fixtures: plain prose, repetition, unicode,
# structure-heavy, and a single char.
TEXT_FIXTURES: tuple[str, ...] = (
    "hello world",
    "abababababababababababababababab" * 8,
    "Der schnelle braune Fuchs — le renard brun — 素早い茶色の狐 🦊",
    '{"key": [1, 2, 3], "nested": {"flag": true}}\n\ttabbed\nline\n' * 4,
    "x",
)


def sts_pairs() -> list[tuple[str, str, float]]:
    """20 graded sentence pairs, gold in [0, 5]."""
    return [
        ("A man is playing a guitar on stage.", "A man plays the guitar in a concert.", 4.8),
        ("The cat sat on the warm windowsill.", "A cat was sitting by the window in the sun.", 4.4),
        ("Children are playing football in the park.", "Kids play soccer on the grass.", 4.2),
        ("She poured coffee into a blue mug.", "Coffee was poured into a cup.", 3.9),
        ("The train arrived ten minutes late.", "The train was delayed by a short while.", 3.6),
        ("He repaired the broken bicycle chain.", "The man fixed his bike.", 3.4),
        ("A woman is reading a newspaper.", "Someone reads the morning paper.", 3.8),
        ("The chef chopped onions for the soup.", "A cook prepares vegetables in a kitchen.", 3.1),
        ("Two dogs are running along the beach.", "A pair of dogs race near the sea.", 4.5),
        ("The museum opens at nine on weekdays.", "The gallery is closed on public holidays.", 1.8),
        ("Rain fell steadily through the night.", "It rained all night long.", 4.6),
        ("He bought a ticket for the evening show.", "She sold her car to a neighbor.", 0.6),
        ("The committee approved the new budget.", "The board signed off on the spending plan.", 4.0),
        ("A bird landed on the garden fence.", "The stock market closed higher today.", 0.1),
        ("Students lined up outside the library.", "A queue of pupils waited by the library door.", 4.3),
        ("The violinist tuned her instrument.", "A musician prepared to perform.", 3.2),
        ("Snow covered the mountain road.", "The road over the pass was white with snow.", 4.4),
        ("He whispered the answer to his friend.", "The engine roared as the plane took off.", 0.2),
        ("The baker sold out of bread by noon.", "By midday no loaves were left at the bakery.", 4.7),
        ("A fisherman cast his net at dawn.", "The accountant reviewed the quarterly report.", 0.3),
    ]


def classify_fixture() -> tuple[dict[int, str], list[tuple[str, int]]]:
    """Three-class topic fixture: exemplars plus 12 labeled records."""
    exemplars = {
        0: "Heavy rain and strong winds are expected tomorrow with falling temperatures.",
        1: "The central bank raised interest rates and markets reacted to the inflation report.",
        2: "The home team scored twice in the second half to win the championship match.",
    }
    records = [
        ("Forecasters warn of thunderstorms and hail across the coast tonight.", 0),
        ("A cold front brings snow and icy roads to the northern valleys.", 0),
        ("Sunny spells will follow the morning fog with light northerly winds.", 0),
        ("Tomorrow stays dry but cloudy before showers arrive at the weekend.", 0),
        ("Shares fell sharply after the quarterly earnings missed expectations.", 1),
        ("Investors moved into bonds as the currency weakened against the dollar.", 1),
        ("The finance minister announced a new tax plan to curb the deficit.", 1),
        ("Bank profits rose on higher lending margins and lower defaults.", 1),
        ("The striker converted a penalty in stoppage time to level the score.", 2),
        ("Their coach praised the defense after a narrow away victory.", 2),
        ("The tournament final went to extra time before the hosts lifted the cup.", 2),
        ("A record crowd watched the derby end in a two-all draw.", 2),
    ]
    return exemplars, records


def rerank_fixture() -> list[dict]:
    """Three queries with candidate passages and graded judgments."""
    return [
        {
            "query": "how do bees make honey",
            "candidates": [
                ("d1", "Bees collect nectar from flowers and convert it into honey inside the hive by evaporation and enzymes."),
                ("d2", "Honey bees store honey in wax combs; worker bees fan their wings to thicken the nectar into honey."),
                ("d3", "The city council approved a new bridge over the river after years of debate."),
                ("d4", "Beekeepers harvest honey in late summer when the combs are capped."),
                ("d5", "A recipe for oat cookies with raisins and a spoonful of cinnamon."),
            ],
            "qrels": {"d1": 2, "d2": 2, "d4": 1, "d3": 0, "d5": 0},
        },
        {
            "query": "symptoms of dehydration in adults",
            "candidates": [
                ("d6", "Thirst, dark urine, dizziness and fatigue are common signs of dehydration in adults."),
                ("d7", "Severe dehydration can cause confusion, rapid heartbeat and fainting and needs urgent care."),
                ("d8", "The painter mixed blue and yellow to get a vivid green for the landscape."),
                ("d9", "Drinking water regularly during exercise helps prevent dehydration."),
            ],
            "qrels": {"d6": 2, "d7": 2, "d9": 1, "d8": 0},
        },
        {
            "query": "repairing a flat bicycle tire",
            "candidates": [
                ("d10", "To fix a flat, remove the wheel, lever off the tire, patch or replace the tube, and inflate."),
                ("d11", "Check the tire for embedded glass or thorns before fitting the new inner tube."),
                ("d12", "Quarterly revenue grew by four percent on strong subscription sales."),
                ("d13", "A floor pump with a pressure gauge makes inflating bicycle tires easier."),
                ("d14", "The orchestra rehearsed the symphony late into the evening."),
            ],
            "qrels": {"d10": 2, "d11": 1, "d13": 1, "d12": 0, "d14": 0},
        },
    ]
