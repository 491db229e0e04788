"""Smoke test for the Python bindings. Run after `maturin develop -m crates/python/Cargo.toml`."""

import os
import sys
import tempfile

import sentikit

POS = ["bohat acha phone hai", "zabardast camera aur acha battery", "acha product mazay ka", "bohat zabardast service"]
NEG = ["bekar phone hai", "ganda camera aur bekar battery", "bohat bura product", "bura aur ganda service"]


def check_in_memory():
    texts = POS + NEG
    labels = ["pos"] * len(POS) + ["neg"] * len(NEG)
    for name in sentikit.algorithms():
        clf = sentikit.Classifier.from_texts(texts, labels, algorithm=name, seed=7)
        assert clf.algorithm == name
        assert clf.classes == ["neg", "pos"]
        assert clf.predict("acha zabardast") in ("neg", "pos")
    mnb = sentikit.Classifier.from_texts(texts, labels)
    assert mnb.predict("bohat acha aur zabardast") == "pos"
    assert mnb.predict("bekar aur ganda") == "neg"
    assert "acha" in mnb.vocabulary
    try:
        sentikit.Classifier.from_texts(texts, labels, algorithm="perceptron")
    except ValueError as e:
        assert "mnb" in str(e)
    else:
        raise AssertionError("unknown algorithm accepted")


def write_arff(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write("@relation reviews\n@attribute text string\n@attribute @@class@@ {neg,pos}\n@data\n")
        for text, label in rows:
            f.write(f"'{text}',{label}\n")


def check_files(tmp):
    train, test = os.path.join(tmp, "train.arff"), os.path.join(tmp, "test.arff")
    write_arff(train, [(t, "pos") for t in POS] + [(t, "neg") for t in NEG])
    write_arff(test, [("acha camera", "pos"), ("bekar battery", "neg")])
    clf = sentikit.Classifier.train(train, algorithm="svm")
    report = clf.evaluate(test)
    assert report["total"] == 2
    assert report["correct"] + report["incorrect"] == 2
    assert report["accuracy"] == report["correct"] / 2
    reports = sentikit.compare(train, test, algorithms=["mnb", "dtree", "knn"])
    assert len(reports) == 3
    accs = [r["accuracy"] for r in reports]
    assert accs == sorted(accs, reverse=True)

    model = os.path.join(tmp, "svm.model")
    clf.save(model)
    loaded = sentikit.Classifier.load(model)
    assert loaded.algorithm == "svm" and loaded.vocabulary is None
    x = [0.0] * len(clf.vocabulary)
    assert loaded.predict_vector(x) == clf.predict_vector(x)
    try:
        sentikit.Classifier.train(os.path.join(tmp, "missing.arff"))
    except OSError:
        pass
    else:
        raise AssertionError("missing file accepted")


def main():
    check_in_memory()
    with tempfile.TemporaryDirectory() as tmp:
        check_files(tmp)
    print(f"sentikit {sentikit.__version__}: python smoke test passed")


if __name__ == "__main__":
    sys.exit(main())
