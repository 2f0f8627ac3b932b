#!/usr/bin/env python3
"""Independent reference for the rule-based sentiment scorer.

Transcribes the published algorithm (Hutto & Gilbert 2014, reference
implementation) but loads the rule tables from data/vader/ so both sides
share the same inputs. Used to freeze tests/fixtures/vader_fixture.tsv.
"""

import math
import os
import sys

B_INCR = 0.293
C_INCR = 0.733
N_SCALAR = -0.74

PUNC_LIST = list("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data", "vader")


def load_tables():
    lexicon = {}
    with open(os.path.join(DATA, "lexicon.txt")) as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            lexicon[parts[0]] = float(parts[1])
    boosters = {}
    with open(os.path.join(DATA, "boosters.tsv")) as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            word, val = line.split("\t")
            boosters[word] = float(val)
    negate = set()
    with open(os.path.join(DATA, "negations.txt")) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                negate.add(line)
    idioms = {}
    with open(os.path.join(DATA, "idioms.tsv")) as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            phrase, val = line.split("\t")
            idioms[phrase] = float(val)
    return lexicon, boosters, negate, idioms


LEXICON, BOOSTER_DICT, NEGATE, SPECIAL_CASES = load_tables()


def negated(input_words, include_nt=True):
    input_words = [str(w).lower() for w in input_words]
    for word in NEGATE:
        if word in input_words:
            return True
    if include_nt:
        for word in input_words:
            if "n't" in word:
                return True
    return False


def normalize(score, alpha=15):
    norm_score = score / math.sqrt((score * score) + alpha)
    if norm_score < -1.0:
        return -1.0
    elif norm_score > 1.0:
        return 1.0
    return norm_score


def allcap_differential(words):
    allcap_words = 0
    for word in words:
        if word.isupper():
            allcap_words += 1
    cap_differential = len(words) - allcap_words
    return 0 < cap_differential < len(words)


def scalar_inc_dec(word, valence, is_cap_diff):
    scalar = 0.0
    word_lower = word.lower()
    if word_lower in BOOSTER_DICT:
        scalar = BOOSTER_DICT[word_lower]
        if valence < 0:
            scalar *= -1
        if word.isupper() and is_cap_diff:
            if valence > 0:
                scalar += C_INCR
            else:
                scalar -= C_INCR
    return scalar


class SentiText:
    def __init__(self, text):
        self.text = text
        self.words_and_emoticons = self._words_and_emoticons()
        self.is_cap_diff = allcap_differential(self.words_and_emoticons)

    @staticmethod
    def _strip_punc_if_word(token):
        stripped = token.strip("".join(PUNC_LIST))
        if len(stripped) <= 2:
            return token
        return stripped

    def _words_and_emoticons(self):
        wes = self.text.split()
        return list(map(self._strip_punc_if_word, wes))


class SentimentIntensityAnalyzer:
    def __init__(self):
        self.lexicon = LEXICON

    def polarity_scores(self, text):
        sentitext = SentiText(text)
        sentiments = []
        words_and_emoticons = sentitext.words_and_emoticons
        for i, item in enumerate(words_and_emoticons):
            valence = 0
            if item.lower() in BOOSTER_DICT:
                sentiments.append(valence)
                continue
            if (i < len(words_and_emoticons) - 1 and item.lower() == "kind" and
                    words_and_emoticons[i + 1].lower() == "of"):
                sentiments.append(valence)
                continue
            sentiments = self.sentiment_valence(valence, sentitext, item, i, sentiments)
        sentiments = self._but_check(words_and_emoticons, sentiments)
        return self.score_valence(sentiments, text)

    def sentiment_valence(self, valence, sentitext, item, i, sentiments):
        is_cap_diff = sentitext.is_cap_diff
        words_and_emoticons = sentitext.words_and_emoticons
        item_lowercase = item.lower()
        if item_lowercase in self.lexicon:
            valence = self.lexicon[item_lowercase]

            if item_lowercase == "no" and i != len(words_and_emoticons) - 1 and \
                    words_and_emoticons[i + 1].lower() in self.lexicon:
                valence = 0.0
            if (i > 0 and words_and_emoticons[i - 1].lower() == "no") \
                    or (i > 1 and words_and_emoticons[i - 2].lower() == "no") \
                    or (i > 2 and words_and_emoticons[i - 3].lower() == "no" and
                        words_and_emoticons[i - 1].lower() in ["or", "nor"]):
                valence = self.lexicon[item_lowercase] * N_SCALAR

            if item.isupper() and is_cap_diff:
                if valence > 0:
                    valence += C_INCR
                else:
                    valence -= C_INCR

            for start_i in range(0, 3):
                if i > start_i and \
                        words_and_emoticons[i - (start_i + 1)].lower() not in self.lexicon:
                    s = scalar_inc_dec(words_and_emoticons[i - (start_i + 1)], valence,
                                       is_cap_diff)
                    if start_i == 1 and s != 0:
                        s = s * 0.95
                    if start_i == 2 and s != 0:
                        s = s * 0.9
                    valence = valence + s
                    valence = self._negation_check(valence, words_and_emoticons,
                                                   start_i, i)
                    if start_i == 2:
                        valence = self._special_idioms_check(valence,
                                                             words_and_emoticons, i)
            valence = self._least_check(valence, words_and_emoticons, i)
        sentiments.append(valence)
        return sentiments

    def _least_check(self, valence, words_and_emoticons, i):
        if i > 1 and words_and_emoticons[i - 1].lower() not in self.lexicon \
                and words_and_emoticons[i - 1].lower() == "least":
            if words_and_emoticons[i - 2].lower() != "at" \
                    and words_and_emoticons[i - 2].lower() != "very":
                valence = valence * N_SCALAR
        elif i > 0 and words_and_emoticons[i - 1].lower() not in self.lexicon \
                and words_and_emoticons[i - 1].lower() == "least":
            valence = valence * N_SCALAR
        return valence

    @staticmethod
    def _but_check(words_and_emoticons, sentiments):
        words_and_emoticons_lower = [str(w).lower() for w in words_and_emoticons]
        if "but" in words_and_emoticons_lower:
            bi = words_and_emoticons_lower.index("but")
            for sentiment in sentiments:
                si = sentiments.index(sentiment)
                if si < bi:
                    sentiments.pop(si)
                    sentiments.insert(si, sentiment * 0.5)
                elif si > bi:
                    sentiments.pop(si)
                    sentiments.insert(si, sentiment * 1.5)
        return sentiments

    @staticmethod
    def _special_idioms_check(valence, words_and_emoticons, i):
        words_and_emoticons_lower = [str(w).lower() for w in words_and_emoticons]
        onezero = "{0} {1}".format(words_and_emoticons_lower[i - 1],
                                   words_and_emoticons_lower[i])
        twoonezero = "{0} {1} {2}".format(words_and_emoticons_lower[i - 2],
                                          words_and_emoticons_lower[i - 1],
                                          words_and_emoticons_lower[i])
        twoone = "{0} {1}".format(words_and_emoticons_lower[i - 2],
                                  words_and_emoticons_lower[i - 1])
        threetwoone = "{0} {1} {2}".format(words_and_emoticons_lower[i - 3],
                                           words_and_emoticons_lower[i - 2],
                                           words_and_emoticons_lower[i - 1])
        threetwo = "{0} {1}".format(words_and_emoticons_lower[i - 3],
                                    words_and_emoticons_lower[i - 2])
        sequences = [onezero, twoonezero, twoone, threetwoone, threetwo]
        for seq in sequences:
            if seq in SPECIAL_CASES:
                valence = SPECIAL_CASES[seq]
                break
        if len(words_and_emoticons_lower) - 1 > i:
            zeroone = "{0} {1}".format(words_and_emoticons_lower[i],
                                       words_and_emoticons_lower[i + 1])
            if zeroone in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroone]
        if len(words_and_emoticons_lower) - 1 > i + 1:
            zeroonetwo = "{0} {1} {2}".format(words_and_emoticons_lower[i],
                                              words_and_emoticons_lower[i + 1],
                                              words_and_emoticons_lower[i + 2])
            if zeroonetwo in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroonetwo]
        n_grams = [threetwoone, threetwo, twoone]
        for n_gram in n_grams:
            if n_gram in BOOSTER_DICT:
                valence = valence + BOOSTER_DICT[n_gram]
        return valence

    @staticmethod
    def _negation_check(valence, words_and_emoticons, start_i, i):
        words_and_emoticons_lower = [str(w).lower() for w in words_and_emoticons]
        if start_i == 0:
            if negated([words_and_emoticons_lower[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        if start_i == 1:
            if words_and_emoticons_lower[i - 2] == "never" and \
                    (words_and_emoticons_lower[i - 1] == "so" or
                     words_and_emoticons_lower[i - 1] == "this"):
                valence = valence * 1.25
            elif words_and_emoticons_lower[i - 2] == "without" and \
                    words_and_emoticons_lower[i - 1] == "doubt":
                valence = valence
            elif negated([words_and_emoticons_lower[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        if start_i == 2:
            if words_and_emoticons_lower[i - 3] == "never" and \
                    (words_and_emoticons_lower[i - 2] == "so" or
                     words_and_emoticons_lower[i - 2] == "this") or \
                    (words_and_emoticons_lower[i - 1] == "so" or
                     words_and_emoticons_lower[i - 1] == "this"):
                valence = valence * 1.25
            elif words_and_emoticons_lower[i - 3] == "without" and \
                    (words_and_emoticons_lower[i - 2] == "doubt" or
                     words_and_emoticons_lower[i - 1] == "doubt"):
                valence = valence
            elif negated([words_and_emoticons_lower[i - (start_i + 1)]]):
                valence = valence * N_SCALAR
        return valence

    @staticmethod
    def _punctuation_emphasis(text):
        ep_count = text.count("!")
        if ep_count > 4:
            ep_count = 4
        ep_amplifier = ep_count * 0.292
        qm_count = text.count("?")
        qm_amplifier = 0
        if qm_count > 1:
            if qm_count <= 3:
                qm_amplifier = qm_count * 0.18
            else:
                qm_amplifier = 0.96
        return ep_amplifier + qm_amplifier

    def score_valence(self, sentiments, text):
        if sentiments:
            sum_s = float(sum(sentiments))
            punct_emph_amplifier = self._punctuation_emphasis(text)
            if sum_s > 0:
                sum_s += punct_emph_amplifier
            elif sum_s < 0:
                sum_s -= punct_emph_amplifier
            compound = normalize(sum_s)
        else:
            compound = 0.0
        return compound


SENTENCES = [
    "The weather is good today",
    "The weather is very good today",
    "The weather is VERY good today",
    "The weather is extremely good today",
    "The weather is not good today",
    "The weather is not very good today",
    "The food was great",
    "The food was GREAT",
    "The food was great!",
    "The food was great!!",
    "The food was great!!!",
    "The food was great!!!!!!",
    "The food was not great",
    "The food was never great",
    "The food was never so great",
    "The food was never this great",
    "Without doubt the plan is good",
    "The plan is without doubt good",
    "The movie was bad",
    "The movie was very bad",
    "The movie was horrible",
    "The movie was not horrible",
    "The movie wasn't horrible",
    "The movie isn't really that bad",
    "The book was good but the ending was terrible",
    "The book was terrible but the ending was good",
    "At least it was cheap",
    "It was the least good option",
    "He is at the very least honest",
    "no good",
    "There is no good reason",
    "no fun at all",
    "This is no good no fun no hope",
    "Is it good or bad or neither or nor",
    "That jacket is bad ass",
    "That party was the bomb",
    "That party was the shit",
    "yeah right that will work",
    "That handshake was the kiss of death",
    "This cake is to die for",
    "She has a broken heart",
    "slightly disappointed with the result",
    "kind of happy with the result",
    "sort of sad about the news",
    "just enough excitement to stay awake",
    "hardly a success",
    "barely acceptable performance",
    "marginally better than before",
    "an utterly fantastic show",
    "a thoroughly enjoyable evening",
    "Is this good?",
    "Is this good??",
    "Is this good???",
    "Is this good?????",
    "Why is this so bad???",
    "AMAZING performance by the whole team",
    "amazing performance by the WHOLE team",
    "TERRIBLE service and COLD food",
    "terrible service and cold food",
    "The staff were friendly and helpful",
    "The staff were unfriendly and rude",
    "I love this so much",
    "I don't love this",
    "I don't hate this",
    "I can't stand this movie",
    "I cannot stand this movie",
    "She never fails to impress",
    "A catastrophe of epic proportions",
    "An unexpected delight from start to finish",
    "Mediocre at best",
    "Surprisingly competent handling of a tricky subject",
    "The crowd was angry and violent",
    "Police arrested the suspect after a robbery",
    "A peaceful protest in the city center",
    "Children laughing and playing in the park",
    "A devastating flood destroyed the village",
    "Rescue workers saved dozens of people",
    "The criminal was convicted of fraud",
    "An innocent man was finally freed",
    "The scenery was breathtaking",
    "The hotel room was filthy",
    "The hotel room was not filthy at all",
    "An absolute masterpiece",
    "A complete disaster",
    "Not a complete disaster",
    "It is what it is",
    "A man walking a dog on the beach",
    "A woman reading a book under a tree",
    "Two people arguing loudly outside",
    "The concert exceeded every expectation",
    "The concert did not meet expectations",
    "What a wonderful world",
    "What a cruel joke",
    "This is hands down the best pizza in town",
    "This pizza is only okay",
    "I would rather die than eat there again",
    "Their support team resolved my issue quickly",
    "Their support team ignored my emails for weeks",
    "so so happy for you both",
    "happy happy joy",
    "The jury found him guilty of murder",
    "The verdict brought relief to the family",
    "A grim reminder of the war",
    "Hope blooms in the strangest places",
    "nothing good ever happens here",
    "nowhere near as fun as promised",
    "The test results were neither good nor bad",
    "An increasingly desperate situation",
    "A mildly amusing distraction",
    "The keynote was incredibly inspiring",
    "The keynote was incredibly boring",
    "GOOD GRIEF this queue is long",
    "the bomb squad defused the device",
    "He dodged a bullet with that decision",
    "A blessing in disguise",
    "Losing that job was a blessing in disguise",
    "The interface is clean and intuitive",
    "The interface is cluttered and confusing",
    "Remarkably few defects for a first release",
    "Uncommonly good coffee",
]


def main():
    out_path = os.path.join(ROOT, "tests", "fixtures", "vader_fixture.tsv")
    analyzer = SentimentIntensityAnalyzer()
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w") as f:
        for sentence in SENTENCES:
            compound = analyzer.polarity_scores(sentence)
            f.write("{0}\t{1:.10f}\n".format(sentence, compound))
    print("wrote {0} ({1} sentences)".format(out_path, len(SENTENCES)))


if __name__ == "__main__":
    sys.exit(main())
