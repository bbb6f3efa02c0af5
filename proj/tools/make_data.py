#!/usr/bin/env python3
"""Regenerates the bundled schemas and the synthetic memorization corpus.

The templates are plausible stand-ins written for this repository; replace
them with guideline-derived text when working with a licensed corpus.
"""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data"

TIME_ROLES = ["Time-Within", "Time-Starting", "Time-Ending", "Time-Before", "Time-After",
              "Time-Holds", "Time-At-Beginning", "Time-At-End"]

ACE_SUBTYPES = {
    "Life": {
        "Be-Born": ["Person", "Time-Within", "Place"],
        "Marry": ["Person", "Time-Within", "Place"],
        "Divorce": ["Person", "Time-Within", "Place"],
        "Injure": ["Agent", "Victim", "Instrument", "Time-Within", "Place"],
        "Die": ["Agent", "Victim", "Instrument", "Time-Within", "Place"],
    },
    "Movement": {
        "Transport": ["Artifact", "Vehicle", "Price", "Origin", "Destination", "Agent"] + TIME_ROLES,
    },
    "Transaction": {
        "Transfer-Ownership": ["Buyer", "Seller", "Beneficiary", "Artifact", "Price", "Time-Within", "Place"],
        "Transfer-Money": ["Giver", "Recipient", "Beneficiary", "Money", "Time-Within", "Place"],
    },
    "Business": {
        "Start-Org": ["Agent", "Org", "Time-Within", "Place"],
        "Merge-Org": ["Org", "Time-Within", "Place"],
        "Declare-Bankruptcy": ["Org", "Time-Within", "Place"],
        "End-Org": ["Org", "Time-Within", "Place"],
    },
    "Conflict": {
        "Attack": ["Attacker", "Target", "Instrument", "Time-Within", "Place"],
        "Demonstrate": ["Entity", "Time-Within", "Place"],
    },
    "Contact": {
        "Meet": ["Entity", "Time-Within", "Place"],
        "Phone-Write": ["Entity", "Time-Within"],
    },
    "Personnel": {
        "Start-Position": ["Person", "Entity", "Position", "Time-Within", "Place"],
        "End-Position": ["Person", "Entity", "Position", "Time-Within", "Place"],
        "Nominate": ["Person", "Agent", "Position", "Time-Within", "Place"],
        "Elect": ["Person", "Entity", "Position", "Time-Within", "Place"],
    },
    "Justice": {
        "Arrest-Jail": ["Person", "Agent", "Crime", "Time-Within", "Place"],
        "Release-Parole": ["Person", "Entity", "Crime", "Time-Within", "Place"],
        "Trial-Hearing": ["Defendant", "Prosecutor", "Adjudicator", "Crime", "Time-Within", "Place"],
        "Charge-Indict": ["Defendant", "Prosecutor", "Adjudicator", "Crime", "Time-Within", "Place"],
        "Sue": ["Plaintiff", "Defendant", "Adjudicator", "Crime", "Time-Within", "Place"],
        "Convict": ["Defendant", "Adjudicator", "Crime", "Time-Within", "Place"],
        "Sentence": ["Defendant", "Adjudicator", "Crime", "Sentence", "Time-Within", "Place"],
        "Fine": ["Entity", "Adjudicator", "Money", "Crime", "Time-Within", "Place"],
        "Execute": ["Person", "Agent", "Crime", "Time-Within", "Place"],
        "Extradite": ["Agent", "Person", "Destination", "Origin", "Crime", "Time-Within"],
        "Acquit": ["Defendant", "Adjudicator", "Crime", "Time-Within", "Place"],
        "Appeal": ["Defendant", "Prosecutor", "Adjudicator", "Crime", "Time-Within", "Place"],
        "Pardon": ["Defendant", "Adjudicator", "Crime", "Time-Within", "Place"],
    },
}

ROLE_PHRASES = {
    "Person": "the person involved",
    "Agent": "the agent responsible",
    "Victim": "the victim",
    "Instrument": "the instrument used",
    "Place": "the location",
    "Artifact": "the item moved or traded",
    "Vehicle": "the vehicle used",
    "Price": "the price paid",
    "Origin": "the starting location",
    "Destination": "the final location",
    "Buyer": "the buyer",
    "Seller": "the seller",
    "Beneficiary": "the beneficiary",
    "Giver": "the giver",
    "Recipient": "the recipient",
    "Money": "the amount of money",
    "Org": "the organization",
    "Attacker": "the attacking agent",
    "Target": "the target",
    "Entity": "the participating party",
    "Position": "the job title",
    "Crime": "the offense",
    "Defendant": "the defendant",
    "Prosecutor": "the prosecuting party",
    "Adjudicator": "the adjudicating party",
    "Plaintiff": "the plaintiff",
    "Sentence": "the punishment",
    "Time-Within": "the time period",
    "Time-Starting": "the start time",
    "Time-Ending": "the end time",
    "Time-Before": "the time before which it happened",
    "Time-After": "the time after which it happened",
    "Time-Holds": "the time during which it held",
    "Time-At-Beginning": "the time at its beginning",
    "Time-At-End": "the time at its end",
}


def readable(label):
    return label.replace("-", " ").lower()


def build_schema(subtypes):
    schema = {"main_types": list(subtypes), "subtypes": [], "roles": []}
    for main, subs in subtypes.items():
        for label, roles in subs.items():
            name = f"{main}.{label}"
            schema["subtypes"].append({
                "name": name,
                "parent": main,
                "trigger_question_template": f"The word indicating the {readable(label)} event is [MASK_SLOT] .",
            })
            for role in roles:
                schema["roles"].append({
                    "name": role,
                    "event_subtype": name,
                    "description_template": f"In this {readable(label)} event , {ROLE_PHRASES[role]} is [MASK_SLOT] .",
                })
    return schema


SYNTHETIC_SUBTYPES = {
    "Justice": {"Convict": ["Defendant", "Adjudicator"], "Sentence": ["Defendant"]},
    "Life": {"Die": ["Victim"], "Injure": []},
    "Conflict": {"Attack": ["Attacker", "Place"]},
}

PEOPLE = ["Alvarez", "Bennett", "Castillo", "Dorsey", "Eriksen", "Fontaine", "Garrido", "Halvorsen", "Ibarra",
          "Jansen", "Kowalski", "Lindqvist", "Moreau", "Nakamura", "Okafor", "Petrov", "Quintero", "Rasmussen",
          "Sorensen", "Tanaka", "Ueda", "Varga", "Whitaker", "Yilmaz", "Zielinski"]
JUDGES = ["Abbott", "Brennan", "Caldwell", "Donovan", "Ellison", "Fairbanks", "Grayson", "Holloway"]
CITIES = ["Avalon", "Brookfield", "Carrow", "Dunmore", "Eastport", "Fairhaven", "Glenrock", "Harlow", "Ironbridge",
          "Kestrel", "Larkspur", "Millbrook"]
GROUPS = ["Insurgents", "Gunmen", "Raiders", "Separatists", "Mercenaries", "Guerrillas"]
FILLERS = [
    "Officials declined to comment on the matter .",
    "The weather in {city} stayed mild all week .",
    "Markets closed higher on {day} .",
    "Reporters gathered outside the building .",
    "Local newspapers covered the story at length .",
    "Residents of {city} expressed mixed feelings .",
]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]


def event_sentence(rng, kind):
    """Returns (tokens, events) where spans are token indices."""
    p, q = rng.sample(PEOPLE, 2)
    judge = rng.choice(JUDGES)
    city = rng.choice(CITIES)
    g1, g2 = rng.sample(GROUPS, 2)
    if kind == "convict_sentence":
        toks = ["Judge", judge, "convicted", "and", "sentenced", p, "in", city, "."]
        return toks, [("Justice.Convict", 2, [("Defendant", 5, 6), ("Adjudicator", 0, 2)]),
                      ("Justice.Sentence", 4, [("Defendant", 5, 6)])]
    if kind == "convict":
        toks = ["A", "jury", "chaired", "by", judge, "convicted", p, "of", "bribery", "."]
        return toks, [("Justice.Convict", 5, [("Defendant", 6, 7), ("Adjudicator", 4, 5)])]
    if kind == "sentence":
        toks = [p, "was", "sentenced", "to", str(rng.randint(2, 30)), "years", "in", "prison", "."]
        return toks, [("Justice.Sentence", 2, [("Defendant", 0, 1)])]
    if kind == "die":
        toks = [p, "died", "at", "home", "in", city, "."]
        return toks, [("Life.Die", 1, [("Victim", 0, 1)])]
    if kind == "attack_die":
        toks = [g1, "stormed", city, "and", "killed", p, "."]
        return toks, [("Conflict.Attack", 1, [("Attacker", 0, 1), ("Place", 2, 3)]),
                      ("Life.Die", 4, [("Victim", 5, 6)])]
    if kind == "attack_two":
        toks = [g1, "and", g2, "bombed", city, "overnight", "."]
        return toks, [("Conflict.Attack", 3, [("Attacker", 0, 1), ("Attacker", 2, 3), ("Place", 4, 5)])]
    if kind == "injure":
        toks = [q, "was", "wounded", "during", "the", "unrest", "."]
        return toks, [("Life.Injure", 2, [])]
    raise ValueError(kind)


KINDS = ["convict_sentence", "convict", "sentence", "die", "attack_die", "attack_two", "injure"]


def build_corpus(rng, n_docs):
    docs = []
    for d in range(n_docs):
        n_sent = rng.randint(3, 5)
        n_events = rng.randint(1, min(3, n_sent))
        event_slots = set(rng.sample(range(n_sent), n_events))
        # Guarantee every template is used at least once across the corpus.
        forced = KINDS[d] if d < len(KINDS) else None
        sentences, events = [], []
        text = ""
        fillers = rng.sample(FILLERS, len(FILLERS))
        for s in range(n_sent):
            if s in event_slots:
                kind = forced or rng.choice(KINDS)
                forced = None
                toks, evs = event_sentence(rng, kind)
            else:
                toks = fillers.pop().format(city=rng.choice(CITIES), day=rng.choice(DAYS)).split()
                evs = []
            if text:
                text += " "
            starts, pos = [], len(text)
            for i, t in enumerate(toks):
                starts.append(pos)
                pos += len(t) + (1 if i + 1 < len(toks) else 0)
            sentence_text = " ".join(toks)
            begin = len(text)
            text += sentence_text

            def span(a, b):
                return [starts[a], starts[b - 1] + len(toks[b - 1])]

            sentences.append([begin, len(text)])
            for subtype, trig, args in evs:
                events.append({
                    "sentence_index": s,
                    "subtype": subtype,
                    "trigger": span(trig, trig + 1),
                    "arguments": [{"role": r, "span": span(a, b), "surface": " ".join(toks[a:b])}
                                  for r, a, b in args],
                })
        docs.append({"doc_id": f"syn-{d:02d}", "text": text, "sentences": sentences, "events": events})
    return docs


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def main():
    write_json(ROOT / "schemas" / "ace2005.json", build_schema(ACE_SUBTYPES))
    write_json(ROOT / "synthetic" / "schema.json", build_schema(SYNTHETIC_SUBTYPES))
    rng = random.Random(42)
    docs = build_corpus(rng, 20)
    with open(ROOT / "synthetic" / "corpus.jsonl", "w") as f:
        for doc in docs:
            f.write(json.dumps(doc) + "\n")
    write_json(ROOT / "synthetic" / "config.json", {
        "schema": "schema.json",
        "corpus": "corpus.jsonl",
        "output_dir": "out",
        "splits": {"counts": [20, 0, 0], "seed": 42},
        "train_splits": ["train"],
        "eval_split": "train",
        "seed": 42,
    })
    write_json(ROOT / "synthetic" / "config_split.json", {
        "schema": "schema.json",
        "corpus": "corpus.jsonl",
        "output_dir": "out_split",
        "splits": {"counts": [12, 4, 4], "seed": 42},
        "seed": 42,
    })
    write_json(ROOT / "synthetic" / "lexicon.json", {
        "home": ["house", "residence"],
        "prison": ["jail"],
        "years": ["winters"],
        "overnight": ["nightly"],
        "unrest": ["turmoil", "riots"],
        "stayed": ["remained"],
        "mild": ["gentle", "calm"],
        "matter": ["issue", "affair"],
        "building": ["hall"],
        "story": ["report"],
    })


if __name__ == "__main__":
    main()
