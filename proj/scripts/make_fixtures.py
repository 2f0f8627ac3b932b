#!/usr/bin/env python3
"""Deterministic synthetic fixtures for the unit and acceptance tests."""

import json
import math
import os
import random
import struct

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIX = os.path.join(ROOT, "tests", "fixtures")

GENDERS = ["male", "female", "unclear"]
RACES = ["black", "east_asian", "latino", "middle_eastern", "south_asian",
         "southeast_asian", "white", "unclear"]

CRIME_WORDS = ["robbery", "arrest", "burglary", "fraud", "assault", "theft"]
COUNTRIES = ["france", "japan", "brazil", "kenya", "india", "germany", "america"]
SENTIMENT = ["happy", "sad", "great", "terrible", "lovely", "awful", "nice"]
CATEGORY_WORDS = ["doctor", "nurse", "teacher", "engineer", "farmer", "chef",
                  "artist", "lawyer", "athlete", "musician"]
FILLER = ["person", "standing", "outside", "near", "building", "holding",
          "camera", "smiling", "street", "market", "crowd", "walking", "portrait",
          "photo", "group", "young", "old", "wearing", "jacket", "hat"]


def caption(rng):
    words = []
    n = rng.randint(5, 14)
    for _ in range(n):
        r = rng.random()
        if r < 0.08:
            words.append(rng.choice(CRIME_WORDS))
        elif r < 0.16:
            words.append(rng.choice(COUNTRIES))
        elif r < 0.28:
            words.append(rng.choice(SENTIMENT))
        elif r < 0.55:
            words.append(rng.choice(CATEGORY_WORDS))
        else:
            words.append(rng.choice(FILLER))
    return "a " + " ".join(words)


def make_images(rng, n):
    images = []
    for i in range(n):
        images.append({
            "image_id": "img%04d" % i,
            "width": rng.choice([640, 800, 1024]),
            "height": rng.choice([480, 600, 768]),
            "alt_text": caption(rng),
        })
    return images


def make_box(rng, img):
    w = rng.randint(8, min(300, img["width"]))
    h = rng.randint(8, min(300, img["height"]))
    x = rng.randint(0, img["width"] - w)
    y = rng.randint(0, img["height"] - h)
    return {
        "image_id": img["image_id"],
        "x": x, "y": y, "w": w, "h": h,
        "confidence": round(rng.uniform(0.25, 1.0), 2),
        "gender": rng.choices(GENDERS, weights=[46, 42, 12])[0],
        "race": rng.choices(RACES, weights=[10, 9, 9, 7, 8, 7, 38, 12])[0],
        "person_caption": None if rng.random() < 0.7 else caption(rng),
    }


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r) + "\n")


def write_sidecar(stem, rows, dim, data, ids=None, identities=None):
    bin_name = stem + ".f32"
    with open(os.path.join(FIX, bin_name), "wb") as f:
        f.write(struct.pack("<%df" % (rows * dim), *data))
    j = {"rows": rows, "dim": dim, "data": bin_name, "ids": None, "identities": None}
    if ids is not None:
        with open(os.path.join(FIX, stem + ".ids"), "w") as f:
            f.write("".join(i + "\n" for i in ids))
        j["ids"] = stem + ".ids"
    if identities is not None:
        with open(os.path.join(FIX, stem + ".identities"), "w") as f:
            f.write("".join(i + "\n" for i in identities))
        j["identities"] = stem + ".identities"
    with open(os.path.join(FIX, stem + ".json"), "w") as f:
        json.dump(j, f, indent=2)
        f.write("\n")


def unit(vec):
    n = math.sqrt(sum(v * v for v in vec))
    return [v / n for v in vec]


def noisy_direction(rng, base, noise):
    v = [b + rng.gauss(0.0, noise) for b in base]
    return unit(v)


def main():
    os.makedirs(FIX, exist_ok=True)
    rng = random.Random(20260824)

    # corpus
    images = make_images(rng, 1000)
    write_jsonl(os.path.join(FIX, "images_1k.jsonl"), images)

    boxes = []
    for img in images:
        for _ in range(rng.choices([0, 1, 2, 3, 4], weights=[15, 45, 25, 10, 5])[0]):
            boxes.append(make_box(rng, img))
    write_jsonl(os.path.join(FIX, "boxes_1k.jsonl"), boxes)

    # images with 3 injected malformed lines; the first sits at line 101
    lines = [json.dumps(i) for i in images]
    lines.insert(100, '{"image_id": "broken"')
    lines.insert(500, "not json at all")
    lines.insert(900, '[]')
    with open(os.path.join(FIX, "images_bad.jsonl"), "w") as f:
        f.write("".join(l + "\n" for l in lines))

    # 10k boxes with exactly 100 orphan image ids spread through the file
    orphan_rows = set(rng.sample(range(10000), 100))
    with open(os.path.join(FIX, "boxes_orphans.jsonl"), "w") as f:
        ghost = 0
        for row in range(10000):
            b = make_box(rng, rng.choice(images))
            if row in orphan_rows:
                b["image_id"] = "ghost%04d" % ghost
                ghost += 1
            f.write(json.dumps(b) + "\n")

    # annotator labels over the first 200 images
    identities = []
    with open(os.path.join(FIX, "labels.jsonl"), "w") as f:
        for i in range(200):
            item = "img%04d" % i
            truth = rng.choices(GENDERS, weights=[45, 45, 10])[0]
            for annotator in ("ann_a", "ann_b", "ann_c"):
                label = truth if rng.random() < 0.85 else rng.choice(GENDERS)
                f.write(json.dumps({"annotator": annotator, "item_id": item,
                                    "label": label}) + "\n")

    # hate scores per image
    with open(os.path.join(FIX, "hate_scores.jsonl"), "w") as f:
        for img in images:
            f.write(json.dumps({
                "image_id": img["image_id"],
                "hateful": round(rng.betavariate(1.2, 8.0), 4),
                "targeted": round(rng.betavariate(1.0, 10.0), 4),
                "aggressive": round(rng.betavariate(1.5, 7.0), 4),
            }) + "\n")

    # caption embeddings: 14 identity groups on distinct directions + noise
    dim = 32
    group_names = ["%s_%s" % (g, r) for g in ("female", "male") for r in RACES[:7]]
    bases = []
    for gi in range(len(group_names)):
        base = [0.0] * dim
        base[gi] = 1.0
        base[(gi + 7) % dim] = 0.5
        bases.append(unit(base))
    emb_data, emb_ids, emb_idents = [], [], []
    for i, img in enumerate(images):
        emb_ids.append(img["image_id"])
        if rng.random() < 0.08:
            emb_idents.append("")
            emb_data.extend(noisy_direction(rng, [0.0] * dim, 1.0))
        else:
            gi = rng.randrange(len(group_names))
            emb_idents.append(group_names[gi])
            emb_data.extend(noisy_direction(rng, bases[gi], 0.15))
    write_sidecar("emb_1k", 1000, dim, emb_data, emb_ids, emb_idents)

    # topic vocabulary: 40 labels in 8 tight direction groups
    topic_labels = []
    topic_data = []
    themes = ["street", "sport", "family", "work", "nature", "music", "food", "travel"]
    for t, theme in enumerate(themes):
        base = [0.0] * dim
        base[2 * t] = 1.0
        base[2 * t + 1] = 0.6
        base = unit(base)
        for v in range(5):
            topic_labels.append("%s_%d" % (theme, v))
            topic_data.extend(noisy_direction(rng, base, 0.02))
    with open(os.path.join(FIX, "topics.csv"), "w") as f:
        f.write("label,source\n")
        for l in topic_labels:
            f.write("%s,synthetic\n" % l)
    write_sidecar("topics_emb", len(topic_labels), dim, topic_data)

    # social categories with text/image embedding panels
    with open(os.path.join(FIX, "categories.csv"), "w") as f:
        f.write("label,source,is_adjective\n")
        for w in CATEGORY_WORDS:
            f.write("%s,occupation,0\n" % w)
        f.write("attractive,trait,1\n")
        f.write("quixotic,trait,1\n")
    with open(os.path.join(FIX, "wordnet_lemmas.txt"), "w") as f:
        for w in CATEGORY_WORDS + ["attractive"]:
            f.write(w + "\n")

    cat_labels = CATEGORY_WORDS + ["attractive", "quixotic"]
    cat_dirs = {}
    cat_data = []
    for ci, label in enumerate(cat_labels):
        base = [0.0] * dim
        base[ci % dim] = 1.0
        base[(ci + 11) % dim] = 0.4
        cat_dirs[label] = unit(base)
        cat_data.extend(cat_dirs[label])
    write_sidecar("cat_emb", len(cat_labels), dim, cat_data, ids=cat_labels)

    # gendered image panels lean toward different category directions
    female_axis = unit([1.0 if i % 2 == 0 else 0.2 for i in range(dim)])
    male_axis = unit([1.0 if i % 2 == 1 else 0.2 for i in range(dim)])
    f_data, m_data = [], []
    for _ in range(20):
        f_data.extend(noisy_direction(rng, female_axis, 0.2))
        m_data.extend(noisy_direction(rng, male_axis, 0.2))
    write_sidecar("female_emb", 20, dim, f_data)
    write_sidecar("male_emb", 20, dim, m_data)

    print("fixtures written to", FIX)


if __name__ == "__main__":
    main()
