"""Regenerate the demo fixtures: world.json and scene_vqa.jsonl.

The world scripts deterministic behavior for all three methods over the
same 13 questions, so any CLI example in the README runs offline:

- the vision oracle answers from scene graphs (objects, attributes,
  depths, canned question/answer pairs);
- the code model maps each question to a hand-written program;
- the instruct model holds the decomposition conversations, the
  nearest-choice mapping, and one knowledge lookup.

Run from the repository root:  python3 fixtures/make_world.py
"""

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent

E2E_TEMPLATE = "Question: {} Short answer: "
FOLLOWUP = "Follow-up:"
FINAL = "Answer to the original question:"

# decision logprobs: the picked continuation must score strictly higher
PICK, SKIP = -0.4, -4.0


def obj(oid, category, box, attributes=(), depth=1.0):
    return {
        "id": oid,
        "category": category,
        "box": list(box),
        "attributes": list(attributes),
        "depth": depth,
    }


SCENES = [
    {
        "image_ref": "kitchen",
        "width": 640,
        "height": 480,
        "objects": [
            obj(0, "woman", (200, 100, 400, 470), ("standing",), 3.0),
            obj(1, "lettuce", (80, 40, 180, 120), ("green", "fresh"), 1.5),
            obj(2, "bowl", (60, 20, 220, 140), ("white",), 1.6),
            obj(3, "knife", (240, 30, 330, 70), ("sharp", "metal"), 1.2),
        ],
        "scene_qa": {},
        "patch_qa": [
            {"object_id": 1, "question": "Has this food been fried?", "answer": "no"},
            {"object_id": 0, "question": "What is this person doing?",
             "answer": "preparing a salad"},
        ],
        "caption": "a woman preparing a salad on a counter",
    },
    {
        "image_ref": "street",
        "width": 800,
        "height": 600,
        "objects": [
            obj(0, "car", (60, 50, 300, 260), ("green",), 8.0),
            obj(1, "fire hydrant", (320, 40, 400, 180), ("red",), 7.5),
            obj(2, "dog", (420, 60, 640, 300), ("brown", "eating"), 12.0),
            obj(3, "bicycle", (500, 300, 780, 520), ("parked",), 15.0),
        ],
        "scene_qa": {},
        "patch_qa": [],
        "caption": "a green car parked near a fire hydrant, a dog eating beside a bicycle",
    },
    {
        "image_ref": "park",
        "width": 640,
        "height": 480,
        "objects": [
            obj(0, "tree", (40, 60, 240, 440), (), 20.0),
            obj(1, "bench", (280, 40, 520, 200), ("wooden", "empty"), 18.0),
            obj(2, "bird", (380, 260, 440, 320), ("small", "flying"), 16.0),
            obj(3, "ball", (540, 40, 600, 100), ("red", "round"), 17.0),
        ],
        "scene_qa": {},
        "patch_qa": [],
        "caption": "a park with a tree, an empty bench, a flying bird, and a red ball",
    },
    {
        "image_ref": "desk",
        "width": 1024,
        "height": 768,
        "objects": [
            obj(0, "laptop", (100, 200, 500, 500), ("open", "silver"), 2.0),
            obj(1, "mug", (550, 180, 680, 360), ("blue", "ceramic"), 2.2),
            obj(2, "notebook", (700, 150, 940, 330), ("closed",), 2.4),
            obj(3, "lamp", (40, 400, 220, 740), ("on",), 3.0),
            obj(4, "poster", (260, 520, 760, 740), ("eiffel tower",), 3.5),
        ],
        "scene_qa": {},
        "patch_qa": [
            {"object_id": 1, "question": "What material is this mug?",
             "answer": "a ceramic mug"},
        ],
        "caption": "a desk with a laptop, a mug, a notebook, a lamp, and a travel poster",
    },
]

SCENES_BY_REF = {scene["image_ref"]: scene for scene in SCENES}


class Question:
    def __init__(self, qid, image_ref, question, answers, qtype, *,
                 choices=None, program=None, program_da=None,
                 conversation=None, e2e=None):
        self.qid = qid
        self.image_ref = image_ref
        self.question = question
        self.answers = answers
        self.qtype = qtype
        self.choices = choices
        self.program = program  # generated function body
        self.program_da = program_da  # body without possible_choices (MC only)
        # conversation: ([(follow-up, vision answer), ...], final answer text)
        self.conversation = conversation
        self.e2e = e2e  # direct answer, or dict of choice logprobs for MC

    def dataset_record(self):
        record = {
            "id": self.qid,
            "image_ref": self.image_ref,
            "question": self.question,
            "answers": self.answers,
            "question_type": self.qtype,
            "split": "demo",
        }
        if self.choices:
            record["choices"] = self.choices
        return record


QUESTIONS = [
    Question(
        "q01", "kitchen",
        "Has the food this woman is preparing been fried?",
        ["no", "no", "no"], "verify",
        program='''    image_patch = ImagePatch(image)
    food = image_patch.find("lettuce")
    if len(food) == 0:
        return "unknown"
    return food[0].simple_query("Has this food been fried?")''',
        conversation=(
            [("What's in the image?",
              "a person is preparing a salad on the counter"),
             ("Has the lettuce been fried?", "no")],
            "no",
        ),
        e2e="no",
    ),
    Question(
        "q02", "kitchen",
        "What color is the lettuce?",
        ["green", "green", "green"], "attribute",
        program='''    image_patch = ImagePatch(image)
    veggies = image_patch.find("lettuce")
    if len(veggies) == 0:
        return "unknown"
    return veggies[0].best_text_match(["green", "red", "brown"])''',
        conversation=(
            [("What vegetables are visible?", "lettuce in a bowl")],
            "green",
        ),
        e2e="green",
    ),
    Question(
        "q03", "street",
        "Is the car close to the fire hydrant?",
        ["yes", "yes", "yes"], "spatial",
        program='''    image_patch = ImagePatch(image)
    cars = image_patch.find("car")
    hydrants = image_patch.find("fire hydrant")
    if len(cars) == 0 or len(hydrants) == 0:
        return "no"
    if distance(cars[0], hydrants[0]) < 300:
        return "yes"
    return "no"''',
        conversation=(
            [("Where is the car relative to the fire hydrant?",
              "right next to it")],
            "yes",
        ),
        e2e="yes",
    ),
    Question(
        "q04", "street",
        "What color is the vehicle near the fire hydrant?",
        ["green", "green", "dark green"], "attribute",
        program='''    image_patch = ImagePatch(image)
    vehicles = image_patch.find("car")
    if len(vehicles) == 0:
        return "unknown"
    vehicle = vehicles[0]
    for color in ["green", "red", "blue", "white"]:
        if vehicle.verify_property("car", color):
            return color
    return "unknown"''',
        conversation=(
            [("What vehicles are in the image?", "a green car")],
            "green",
        ),
        e2e="green",
    ),
    Question(
        "q05", "street",
        "What is parked next to the dog?",
        ["bicycle", "bicycle", "bicycle"], "mc-spatial",
        choices=["bicycle", "car"],
        program='''    image_patch = ImagePatch(image)
    dogs = image_patch.find("dog")
    if len(dogs) == 0:
        return possible_choices[0]
    best = possible_choices[0]
    best_dist = 100000
    for choice in possible_choices:
        patches = image_patch.find(choice)
        if len(patches) == 0:
            continue
        d = distance(dogs[0], patches[0])
        if d < best_dist:
            best_dist = d
            best = choice
    return best''',
        program_da='''    image_patch = ImagePatch(image)
    dogs = image_patch.find("dog")
    if len(dogs) == 0:
        return "unknown"
    best = "unknown"
    best_dist = 100000
    for name in ["bicycle", "car"]:
        patches = image_patch.find(name)
        if len(patches) == 0:
            continue
        d = distance(dogs[0], patches[0])
        if d < best_dist:
            best_dist = d
            best = name
    return best''',
        conversation=(
            [("What objects are near the dog?", "a parked bicycle")],
            {"bicycle": -0.2, "car": -3.0},
        ),
        e2e={"bicycle": -0.3, "car": -1.8},
    ),
    Question(
        "q06", "park",
        "How many birds are in the image?",
        ["1", "one", "1"], "counting",
        program='''    image_patch = ImagePatch(image)
    sky_region = image_patch.crop(0, 240, 640, 480)
    birds = sky_region.find("bird")
    return len(birds)''',
        conversation=(
            [("What animals are in the image?", "a single bird in the air")],
            "1",
        ),
        e2e="1",
    ),
    Question(
        "q07", "park",
        "Is the bench occupied?",
        ["no", "no", "no"], "verify",
        program='''    image_patch = ImagePatch(image)
    benches = image_patch.find("bench")
    if len(benches) == 0:
        return "no"
    if benches[0].verify_property("bench", "empty"):
        return "no"
    return "yes"''',
        conversation=(
            [("Is anyone sitting on the bench?", "no, the bench is empty")],
            "no",
        ),
        e2e="no",
    ),
    Question(
        "q08", "park",
        "What object in the park is red?",
        ["ball", "ball", "the ball"], "attribute",
        program='''    image_patch = ImagePatch(image)
    for name in ["tree", "bench", "ball"]:
        patches = image_patch.find(name)
        if len(patches) > 0 and patches[0].verify_property(name, "red"):
            return name
    return "unknown"''',
        conversation=(
            [("What objects are in the park?",
              "a tree, a wooden bench, a bird, and a red ball")],
            "ball",
        ),
        e2e="ball",
    ),
    Question(
        "q09", "desk",
        "Is the mug to the left of the laptop?",
        ["no", "no", "no"], "spatial",
        program='''    image_patch = ImagePatch(image)
    mugs = image_patch.find("mug")
    laptops = image_patch.find("laptop")
    if len(mugs) == 0 or len(laptops) == 0:
        return "unknown"
    if mugs[0].horizontal_center < laptops[0].horizontal_center:
        return "yes"
    return "no"''',
        conversation=(
            [("Where is the mug?", "to the right of the laptop")],
            "no",
        ),
        e2e="no",
    ),
    Question(
        "q10", "desk",
        "What is the capital of the country famous for the Eiffel Tower?",
        ["paris", "paris", "paris"], "knowledge",
        program='''    poster_question = "What is the capital of France?"
    return llm_query(poster_question)''',
        conversation=(
            [("What landmark is shown?", "the eiffel tower on a poster")],
            "paris",
        ),
        e2e="paris",
    ),
    Question(
        "q11", "desk",
        "What material is the mug?",
        ["ceramic", "ceramic", "ceramic"], "mc-attribute",
        choices=["ceramic", "plastic", "metal"],
        program='''    image_patch = ImagePatch(image)
    mugs = image_patch.find("mug")
    if len(mugs) == 0:
        return possible_choices[0]
    return mugs[0].simple_query("What material is this mug?")''',
        program_da='''    image_patch = ImagePatch(image)
    mugs = image_patch.find("mug")
    if len(mugs) == 0:
        return "unknown"
    return mugs[0].best_text_match(["ceramic", "plastic", "metal"])''',
        conversation=(
            [("What does the mug look like?", "a blue ceramic mug")],
            {"ceramic": -0.1, "plastic": -2.6, "metal": -2.3},
        ),
        e2e={"ceramic": -0.25, "plastic": -2.1, "metal": -1.9},
    ),
    Question(
        "q12", "street",
        "Is the dog eating?",
        ["yes", "yes", "yes"], "verify",
        program='''    image_patch = ImagePatch(image)
    if not image_patch.exists("dog"):
        return "no"
    dogs = image_patch.find("dog")
    if dogs[0].verify_property("dog", "eating"):
        return "yes"
    return "no"''',
        conversation=(
            [("What is the dog doing?", "eating something off the ground")],
            "yes",
        ),
        e2e="yes",
    ),
    Question(
        "q13", "desk",
        "Which object is closer to the camera, the laptop or the lamp?",
        ["laptop", "laptop", "the laptop"], "comparison",
        program='''    image_patch = ImagePatch(image)
    laptops = image_patch.find("laptop")
    lamps = image_patch.find("lamp")
    if len(laptops) == 0 or len(lamps) == 0:
        return "unknown"
    if laptops[0].compute_depth() < lamps[0].compute_depth():
        return "laptop"
    return "lamp"''',
        conversation=(
            [("How far away is the laptop compared to the lamp?",
              "the laptop is nearer")],
            "laptop",
        ),
        e2e="laptop",
    ),
]


def build_world():
    code_rules = []
    instruct_rules = []
    instruct_scores = []
    vlm_scores = []

    # One knowledge lookup used by a generated program (q10).
    instruct_rules.append({
        "match": {"exact": "What is the capital of France?"},
        "text": " Paris",
    })

    for q in QUESTIONS:
        scene = SCENES_BY_REF[q.image_ref]

        # end-to-end: the templated question goes straight to the oracle;
        # multiple choice also needs choice scores for the same prompt
        prompt = E2E_TEMPLATE.format(q.question)
        if isinstance(q.e2e, dict):
            vlm_scores.append({
                "match": {"contains": prompt},
                "continuations": q.e2e,
            })
            scene["scene_qa"][prompt] = max(q.e2e, key=q.e2e.get)
        else:
            scene["scene_qa"][prompt] = q.e2e

        # modular: question comment -> program body; questions that carry
        # choices get a choice-aware body when the prompt lists possible
        # answers, and a plain body otherwise (rule order decides)
        if q.program_da is not None:
            code_rules.append({
                "match": {"contains": [f"# {q.question}\n", "# possible answers"]},
                "text": q.program,
            })
            code_rules.append({
                "match": {"contains": f"# {q.question}\n"},
                "text": q.program_da,
            })
        else:
            code_rules.append({
                "match": {"contains": f"# {q.question}\n"},
                "text": q.program,
            })

        # successive: decomposition conversation
        followups, final = q.conversation
        qline = f"Question: {q.question}"
        for fq, fa in followups:
            scene["scene_qa"][fq] = fa
        # decision rules, most advanced state first; states after the
        # first anchor on the prompt's final line, which the in-context
        # demonstrations can never fake (their text is mid-prompt), and
        # the opening state is the contains-only fallback
        for i in range(len(followups), -1, -1):
            match = {"contains": [qline]}
            if i > 0:
                match["suffix"] = f"Follow-up answer: {followups[i - 1][1]}\n"
            done = i == len(followups)
            instruct_scores.append({
                "match": match,
                "continuations": {
                    FOLLOWUP: SKIP if done else PICK,
                    FINAL: PICK if done else SKIP,
                },
            })
        # follow-up generation, most advanced state first
        for i in range(len(followups) - 1, -1, -1):
            marks = [qline]
            if i > 0:
                marks.append(f"Follow-up answer: {followups[i - 1][1]}")
            instruct_rules.append({
                "match": {"contains": marks, "suffix": FOLLOWUP},
                "text": f" {followups[i][0]}",
            })
        # final answer: choice scores for multiple choice, a completion
        # for direct answering (both present when the question has choices)
        if isinstance(final, dict):
            instruct_scores.append({
                "match": {"contains": [qline], "suffix": f"{FINAL} "},
                "continuations": final,
            })
            final_text = max(final, key=final.get)
        else:
            final_text = final
        instruct_rules.append({
            "match": {"contains": [qline], "suffix": FINAL},
            "text": f" {final_text}",
        })

        # nearest-choice mapping for the one program answering in free text
        if q.qid == "q11":
            instruct_scores.append({
                "match": {"contains": "Candidate: a ceramic mug"},
                "continuations": {"ceramic": -0.2, "plastic": -2.5, "metal": -2.2},
            })

    return {
        "scenes": SCENES,
        "code_lm": {"rules": code_rules, "scores": []},
        "instruct_lm": {"rules": instruct_rules, "scores": instruct_scores},
        "vlm_scores": vlm_scores,
    }


def main():
    world = build_world()
    world_path = HERE / "world.json"
    world_path.write_text(
        json.dumps(world, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    dataset_path = HERE / "scene_vqa.jsonl"
    lines = [json.dumps(q.dataset_record(), ensure_ascii=False) for q in QUESTIONS]
    dataset_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    mc_path = HERE / "scene_mc.jsonl"
    mc_lines = [
        json.dumps(q.dataset_record(), ensure_ascii=False)
        for q in QUESTIONS
        if q.choices
    ]
    mc_path.write_text("\n".join(mc_lines) + "\n", encoding="utf-8")
    print(f"wrote {world_path}, {dataset_path}, and {mc_path}")


if __name__ == "__main__":
    main()
