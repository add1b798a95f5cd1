#!/usr/bin/env python3
"""Regenerate the benchmark fixtures in data/.

    python3 tools/gen_fixtures.py [--out data]

Writes dataset.jsonl (evaluation split, 44 records per category) and
shots.jsonl (worked examples for the prompt). Both are fully determined by
the seeds below, so rerunning the script reproduces the files byte for byte.
"""

import argparse
import json
import random
from pathlib import Path

EVAL_SEED = 1207
SHOT_SEED = 3391
PER_CATEGORY = 44
SHOT_COUNT = 24

ROOMS = ["kitchen", "living_room", "dining_room", "bedroom", "hallway"]
SURFACES = {
    "kitchen": ["counter", "fridge_shelf"],
    "living_room": ["table", "bookshelf"],
    "dining_room": ["dining_table"],
    "bedroom": ["nightstand"],
    "hallway": ["shoe_rack"],
}
DOORS = {"fridge_door": "kitchen", "front_door": "hallway", "bedroom_door": "bedroom"}
OBJECTS = ["cereal", "bowl", "apple", "milk", "cup", "book", "plate", "banana", "phone", "shoe", "bottle", "sponge"]
CONTAINERS = ["bowl", "cup", "plate", "box"]
POURABLE = ["milk", "cereal", "water", "juice"]
COLORS = ["black", "blue", "red", "green", "white", "yellow", "gray"]
CLOTHING = ["t-shirt", "jacket", "dress", "hoodie", "shirt", "sweater", "hat"]
POSTURES = ["sitting", "standing", "waving", "lying"]
NAMES = ["Alex", "Maria", "Sam", "Jordan", "Kim", "Noah", "Lena", "Omar", "Yuki", "Priya", "Tom", "Sara"]
TOPICS = {
    "name": ["what is your name", "who are you", "tell me your name"],
    "origin": ["where are you from", "which country do you come from", "where do you originate from"],
    "capabilities": ["what can you do", "tell me your skills", "what are your abilities"],
    "achievements": ["what are your achievements", "tell me about your accomplishments"],
    "favorite_color": ["what is your favorite color", "which colour do you like best"],
    "role": ["what is your job", "what is your role in this house"],
}
POLITE = ["", "please ", "could you ", "hey robot, ", "robot, "]


def q(s):
    return "'" + s.replace("\\", "\\\\").replace("'", "\\'") + "'"


def call(name, *args):
    return name + "(" + ", ".join(q(a) for a in args) + ")"


def human(room):
    return room.replace("_", " ")


def person_desc(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return "wearing " + rng.choice(COLORS) + " " + rng.choice(CLOTHING)
    if kind == 1:
        return rng.choice(POSTURES)
    return "with " + rng.choice(COLORS) + " " + rng.choice(CLOTHING)


def simple(rng):
    kind = rng.randrange(4)
    room = rng.choice(ROOMS)
    if kind == 0:
        verb = rng.choice(["go to", "move to", "head over to", "navigate to"])
        return f"{verb} the {human(room)}", [call("Move_To", room)]
    door, droom = rng.choice(sorted(DOORS.items()))
    verb = rng.choice(["Open", "Close"])
    if kind == 1:
        return f"{verb.lower()} the {door.replace('_', ' ')}", [call("Move_To", droom), call(verb, door)]
    if kind == 2:
        return (f"go to the {human(room)} and tell everyone hello",
                [call("Move_To", room), call("Respond", "hello everyone")])
    return (f"move to the {human(droom)}, {verb.lower()} the {door.replace('_', ' ')} and come back to the {human(room)}",
            [call("Move_To", droom), call(verb, door), call("Move_To", room)])


def fetch(rng):
    kind = rng.randrange(4)
    obj = rng.choice(OBJECTS)
    src = rng.choice(ROOMS)
    dst = rng.choice([r for r in ROOMS if r != src])
    surface = rng.choice(SURFACES[dst])
    color = rng.choice(COLORS)
    if kind == 0:
        return (f"bring the {obj} from the {human(src)} to the {surface.replace('_', ' ')}",
                [call("Move_To", src), call("Search_Object", obj, ""), call("Pickup"), call("Move_To", dst),
                 call("Place_On", surface)])
    if kind == 1:
        return (f"take the {color} {obj} in the {human(src)} and put it on the {surface.replace('_', ' ')} in the {human(dst)}",
                [call("Move_To", src), call("Search_Object", obj, color), call("Pickup"), call("Move_To", dst),
                 call("Place_On", surface)])
    if kind == 2:
        other = rng.choice([o for o in OBJECTS if o != obj])
        return (f"put the {obj} from the {human(src)} next to the {other} in the {human(dst)}",
                [call("Move_To", src), call("Search_Object", obj, ""), call("Pickup"), call("Move_To", dst),
                 call("Place_Next", other)])
    liquid = rng.choice(POURABLE)
    container = rng.choice(CONTAINERS)
    return (f"pour the {liquid} into the {container} in the {human(src)}",
            [call("Move_To", src), call("Search_Object", liquid, ""), call("Pickup"), call("Pour_In", container)])


def deliver(rng):
    obj = rng.choice(OBJECTS)
    src = rng.choice(ROOMS)
    dst = rng.choice(ROOMS)
    if rng.randrange(2):
        desc = person_desc(rng)
        return (f"give the {obj} from the {human(src)} to the person {desc} in the {human(dst)}",
                [call("Move_To", src), call("Search_Object", obj, ""), call("Pickup"), call("Move_To", dst),
                 call("Search_Person", "", desc), call("Give_To")])
    name = rng.choice(NAMES)
    return (f"hand {name} the {obj} that is in the {human(src)}, {name} is in the {human(dst)}",
            [call("Move_To", src), call("Search_Object", obj, ""), call("Pickup"), call("Move_To", dst),
             call("Search_Person", name, ""), call("Give_To")])


def follow(rng):
    room = rng.choice(ROOMS)
    if rng.randrange(2):
        desc = person_desc(rng)
        return (f"follow the person {desc} in the {human(room)}",
                [call("Move_To", room), call("Search_Person", "", desc), call("Follow")])
    name = rng.choice(NAMES)
    tail = rng.choice(["", " and tell them when you arrive"])
    plan = [call("Move_To", room), call("Search_Person", name, ""), call("Follow")]
    if tail:
        plan.append(call("Respond", "we have arrived"))
    return f"find {name} in the {human(room)} and follow them{tail}", plan


def meet(rng):
    room = rng.choice(ROOMS)
    kind = rng.randrange(3)
    if kind == 0:
        name = rng.choice(NAMES)
        return (f"meet {name} in the {human(room)} and introduce yourself",
                [call("Move_To", room), call("Search_Person", name, ""), call("Respond", "introduce yourself")])
    desc = person_desc(rng)
    if kind == 1:
        return (f"ask the name of the person {desc} in the {human(room)}",
                [call("Move_To", room), call("Search_Person", "", desc), call("Ask_Name"), call("Answer")])
    back = rng.choice([r for r in ROOMS if r != room])
    return (f"go meet the person {desc} in the {human(room)}, learn their name and tell me in the {human(back)}",
            [call("Move_To", room), call("Search_Person", "", desc), call("Ask_Name"), call("Move_To", back),
             call("Answer")])


def guide(rng):
    src = rng.choice(ROOMS)
    dst = rng.choice([r for r in ROOMS if r != src])
    name = rng.choice(NAMES)
    if rng.randrange(2):
        return (f"guide {name} from the {human(src)} to the {human(dst)}",
                [call("Move_To", src), call("Search_Person", name, ""), call("Respond", "please follow me"),
                 call("Move_To", dst), call("Respond", "we have arrived")])
    desc = person_desc(rng)
    return (f"escort the person {desc} waiting in the {human(src)} to the {human(dst)}",
            [call("Move_To", src), call("Search_Person", "", desc), call("Respond", "please follow me"),
             call("Move_To", dst), call("Respond", "this is the " + human(dst))])


def count(rng):
    room = rng.choice(ROOMS)
    kind = rng.randrange(3)
    if kind == 0:
        posture = rng.choice(POSTURES)
        return (f"how many people are {posture} in the {human(room)}",
                [call("Move_To", room), call("Count_Person", posture), call("Answer")])
    if kind == 1:
        obj = rng.choice(OBJECTS)
        return (f"count the {obj}s in the {human(room)}",
                [call("Move_To", room), call("Count_Object", obj, ""), call("Answer")])
    obj = rng.choice(OBJECTS)
    color = rng.choice(COLORS)
    return (f"tell me how many {color} {obj}s there are in the {human(room)}",
            [call("Move_To", room), call("Count_Object", obj, color), call("Answer")])


def describe(rng):
    room = rng.choice(ROOMS)
    kind = rng.randrange(3)
    if kind == 0:
        obj = rng.choice(OBJECTS)
        return (f"what color is the {obj} in the {human(room)}",
                [call("Move_To", room), call("Search_Object", obj, ""),
                 call("Vision_Ask", f"what color is the {obj}"), call("Answer")])
    if kind == 1:
        posture = rng.choice(POSTURES)
        return (f"describe what the person {posture} in the {human(room)} is wearing",
                [call("Move_To", room), call("Search_Person", "", posture),
                 call("Vision_Ask", "what clothing is the person wearing"), call("Answer")])
    return (f"look around the {human(room)} and tell me what you see",
            [call("Move_To", room), call("Vision_Ask", "what objects are in the room"), call("Answer")])


def memory(rng):
    topic = rng.choice(sorted(TOPICS))
    question = rng.choice(TOPICS[topic])
    prefix = rng.choice(POLITE[3:] + [""])
    if rng.randrange(4) == 0:
        return (f"{prefix}{question}, then wait for my next request",
                [call("Respond", question), call("New_Request")])
    return f"{prefix}{question}", [call("Respond", question)]


TIME_QUESTIONS = {
    "What_Time": ["tell me what time it is", "what time is it", "do you know the time", "what is the current time"],
    "What_Day": ["tell me what day it is today", "what is today's date", "which day is it"],
    "What_Tomorrow": ["tell me the date tomorrow", "what date is tomorrow", "what day will it be tomorrow"],
}


def time_(rng):
    if rng.randrange(5):
        action = rng.choice(sorted(TIME_QUESTIONS))
        return rng.choice(POLITE) + rng.choice(TIME_QUESTIONS[action]), [call(action), call("Answer")]
    room = rng.choice(ROOMS)
    action, what = rng.choice([("What_Time", "the time"), ("What_Day", "today's date")])
    return f"go to the {human(room)} and announce {what}", [call("Move_To", room), call(action), call("Answer")]


def mixed(rng):
    obj = rng.choice(OBJECTS)
    src = rng.choice(ROOMS)
    dst = rng.choice(ROOMS)
    topic = rng.choice(sorted(TOPICS))
    question = rng.choice(TOPICS[topic])
    desc = person_desc(rng)
    return (f"bring the {obj} in the {human(src)} to the person {desc} in the {human(dst)} and answer: {question}",
            [call("Move_To", src), call("Search_Object", obj, ""), call("Pickup"), call("Move_To", dst),
             call("Search_Person", "", desc), call("Give_To"), call("Respond", question)])


CATEGORIES = [
    ("Simple", simple),
    ("Fetch", fetch),
    ("Deliver", deliver),
    ("Follow", follow),
    ("Meet", meet),
    ("Guide", guide),
    ("Count", count),
    ("Describe", describe),
    ("Memory", memory),
    ("Time", time_),
    ("Mixed", mixed),
]


def encode(steps, rng):
    """Gold plans use either newline or comma separators, like raw model output."""
    return "\n".join(steps) if rng.randrange(3) else ", ".join(steps)


def generate(seed, per_category, id_prefix, taken):
    rng = random.Random(seed)
    records = []
    for category, make in CATEGORIES:
        n = 0
        attempts = 0
        while n < per_category:
            attempts += 1
            if attempts > per_category * 200:
                raise SystemExit(f"cannot find {per_category} distinct instructions for {category}")
            instruction, steps = make(rng)
            instruction = instruction[0].upper() + instruction[1:]
            if instruction in taken:
                continue
            taken.add(instruction)
            n += 1
            records.append({
                "id": f"{id_prefix}{category.lower()}-{n:03d}",
                "category": category,
                "instruction": instruction,
                "gold_plan": encode(steps, rng),
                "scenario": category.lower() + "/" + str((n - 1) // 4),
            })
    return records


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    taken = set()
    evaluation = generate(EVAL_SEED, PER_CATEGORY, "", taken)
    shots_pool = generate(SHOT_SEED, 3, "shot-", taken)
    shots = random.Random(SHOT_SEED).sample(shots_pool, SHOT_COUNT)
    write_jsonl(args.out / "dataset.jsonl", evaluation)
    write_jsonl(args.out / "shots.jsonl", shots)
    print(f"wrote {len(evaluation)} evaluation records and {len(shots)} shots to {args.out}")


if __name__ == "__main__":
    main()
