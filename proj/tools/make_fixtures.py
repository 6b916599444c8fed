#!/usr/bin/env python3
"""Regenerates the synthetic test corpora under tests/data/.

The blog corpus is produced by a word-bigram chain over hand-written Persian
sentences, then dirtied the way scraped blog posts are: Arabic yeh/kaf,
kashida, diacritics, digits in three scripts, elongated words, presentation
forms, stray zero-width characters. A few percent of posts are Arabic.

Usage: python3 tools/make_fixtures.py [--out tests/data]
"""
import argparse
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)
DISC = os.path.join(ROOT, "tests", "data", "discriminator")

EXTRA_PERSIAN = """
دانشجویان دانشگاه تهران برای برگزاری جشن پایان سال تحصیلی برنامه‌ریزی کرده‌اند و از همه دعوت کرده‌اند.
فروشگاه‌های بزرگ شهر در روزهای پایانی سال شلوغ می‌شوند و مردم برای خرید لباس نو صف می‌کشند.
بسیاری از نویسندگان جوان در وبلاگ‌های خود درباره‌ی مسائل اجتماعی و فرهنگی می‌نویسند.
او گفت که فردا صبح با قطار به مشهد می‌رود و چند روز در خانه‌ی برادرش می‌ماند.
ما هر سال تابستان به کنار دریای خزر می‌رویم و چند هفته در ویلای کوچکی استراحت می‌کنیم.
بازی دیشب تیم ملی فوتبال بسیار هیجان‌انگیز بود و هواداران تا نیمه‌شب در خیابان‌ها شادی کردند.
کارشناسان می‌گویند که کمبود آب یکی از بزرگ‌ترین چالش‌های کشور در سال‌های آینده خواهد بود.
دخترم تازه به مدرسه رفته است و هر روز با هیجان از دوستان جدیدش برایم تعریف می‌کند.
برای درست کردن این غذا ابتدا پیاز را خرد کنید و در روغن تفت دهید تا طلایی شود.
نمایشگاه کتاب امسال با استقبال زیادی روبرو شد و ناشران کتاب‌های تازه‌ی خود را عرضه کردند.
پزشک به من توصیه کرد که کمتر قهوه بنوشم و بیشتر میوه و سبزی بخورم.
شب‌های یلدا خانواده دور هم جمع می‌شوند، انار و هندوانه می‌خورند و فال حافظ می‌گیرند.
گوشی جدیدی که خریدم دوربین خوبی دارد ولی باتری آن زود تمام می‌شود.
در روستای ما هنوز نانوایی سنتی وجود دارد که نان سنگک تازه می‌پزد.
هنرمندان این گروه موسیقی سال‌هاست که آثار شاعران بزرگ را با آهنگ‌های تازه اجرا می‌کنند.
مسافران هواپیما به دلیل خرابی موتور چند ساعت در فرودگاه منتظر ماندند.
نمی‌دانم چرا این روزها حوصله‌ی هیچ کاری را ندارم؛ شاید به کمی استراحت نیاز دارم.
فیلم‌های قدیمی سینمای ایران را بیشتر از فیلم‌های امروزی دوست دارم.
باغ‌های انار ساوه در پاییز منظره‌ی بسیار زیبایی دارند و گردشگران زیادی به آنجا می‌آیند.
همکارم پیشنهاد داد که برای حل این مشکل نرم‌افزار تازه‌ای بنویسیم.
"""

LEXICON = """
آسمان ابر باد دریا جنگل کوه دشت رود چشمه ستاره ماه خورشید زمین شهر روستا خیابان کوچه میدان بازار
مسجد مدرسه دانشگاه بیمارستان اداره کارخانه مزرعه باغ خانه آشپزخانه اتاق پنجره در دیوار سقف فرش
میز صندلی کتاب دفتر قلم مداد کاغذ نامه روزنامه مجله رادیو تلویزیون رایانه گوشی اینترنت وبلاگ
پدر مادر برادر خواهر پسر دختر عمو دایی خاله عمه پدربزرگ مادربزرگ دوست همسایه همکار استاد شاگرد
پزشک پرستار راننده نانوا کشاورز معلم مهندس نویسنده شاعر نقاش خواننده بازیگر ورزشکار فروشنده
زیبا زشت بزرگ کوچک بلند کوتاه تازه کهنه گرم سرد خوشحال غمگین مهربان خسته آرام شلوغ ساکت روشن تاریک
سبز سرخ زرد آبی سفید سیاه قهوه‌ای نارنجی بنفش خاکستری
رفتن آمدن دیدن گفتن شنیدن نوشتن خواندن خوردن نوشیدن خوابیدن نشستن ایستادن دویدن پختن شستن ساختن
می‌روم می‌آیی می‌بیند می‌گوییم می‌شنوید می‌نویسند می‌خوانم می‌خوری می‌خوابد می‌نشینیم می‌دوید می‌پزند
رفتم آمدی دید گفتیم شنیدید نوشتند خواندم خوردی خوابید نشستیم ساختید پختند
نوروز یلدا مهرگان بهار تابستان پاییز زمستان شنبه یکشنبه دوشنبه سه‌شنبه چهارشنبه پنجشنبه جمعه
فروردین اردیبهشت خرداد تیر مرداد شهریور مهر آبان آذر دی بهمن اسفند
تهران شیراز اصفهان تبریز مشهد کرمان یزد رشت همدان کاشان قزوین ساری اهواز زنجان
""".split()

ARABIC_EXTRA = """
كان الطقس جميلا في ذلك اليوم فخرجنا إلى الحديقة العامة مع الأطفال وتناولنا الغداء تحت الأشجار.
قالت المعلمة إن الامتحان سيكون في الأسبوع القادم وإن على الطلاب أن يراجعوا الدروس السابقة.
تعتبر القراءة من أهم الوسائل التي تساعد الإنسان على تطوير معرفته وتوسيع آفاقه.
في هذه المدونة أكتب عن تجاربي اليومية وعن الكتب التي أقرؤها والأماكن التي أزورها.
"""


def sentences(text):
    return [line.strip() for line in text.splitlines() if line.strip()]


def read_lines(name):
    with open(os.path.join(DISC, name), encoding="utf-8") as f:
        return sentences(f.read())


class Chain:
    """Word bigram chain with sentence boundaries."""

    def __init__(self, lines):
        self.next = {}
        for line in lines:
            words = ["<s>"] + line.split() + ["</s>"]
            for a, b in zip(words, words[1:]):
                self.next.setdefault(a, []).append(b)

    def sentence(self, rng, max_words=40):
        out = []
        w = "<s>"
        while len(out) < max_words:
            w = rng.choice(self.next[w])
            if w == "</s>":
                break
            out.append(w)
        return out


def to_digits(n, script):
    s = str(n)
    if script == "fa":
        return s.translate(str.maketrans("0123456789", "۰۱۲۳۴۵۶۷۸۹"))
    if script == "ar":
        return s.translate(str.maketrans("0123456789", "٠١٢٣٤٥٦٧٨٩"))
    return s


def persian_text(rng, chain, n_words):
    words = []
    while len(words) < n_words:
        s = chain.sentence(rng)
        if rng.random() < 0.3:
            for _ in range(rng.randint(1, 3)):
                s.insert(rng.randrange(len(s) + 1), rng.choice(LEXICON))
        if rng.random() < 0.25:
            pos = rng.randrange(len(s) + 1)
            script = rng.choice(["fa", "fa", "ascii", "ar"])
            s.insert(pos, to_digits(rng.choice([rng.randint(1, 31), rng.randint(1350, 1402),
                                                 rng.randint(1000, 999999)]), script))
        words.extend(s)
        if words and not words[-1].endswith(("!", "؟", ".", "؛")):
            words[-1] += rng.choice([".", ".", ".", "!", "؟"])
    return words[:max(n_words, 1)]


def dirty(rng, words):
    out = []
    arabic_letters = rng.random() < 0.35
    for w in words:
        if arabic_letters and rng.random() < 0.4:
            w = w.replace("ی", "ي").replace("ک", "ك")
        if rng.random() < 0.02 and len(w) > 2:
            i = rng.randrange(1, len(w))
            w = w[:i] + "ـ" * rng.randint(1, 4) + w[i:]
        if rng.random() < 0.015 and len(w) > 1:
            w = w + w[-1] * rng.randint(3, 7)
        if rng.random() < 0.01:
            w = w[:1] + rng.choice(["َ", "ُ", "ِ", "ّ"]) + w[1:]
        if rng.random() < 0.005:
            w = w.replace("لا", "ﻻ")
        if rng.random() < 0.005:
            w = w + "‏"
        out.append(w)
    if rng.random() < 0.05:
        out.append(rng.choice(["!!!!", "؟؟؟؟", "......"]))
    return out


def blog_corpus(rng, persian, arabic, target_bytes):
    docs = []
    size = 0
    i = 0
    while size < target_bytes:
        i += 1
        r = rng.random()
        if r < 0.05:
            words = []
            while len(words) < rng.randint(25, 80):
                words.extend(arabic.sentence(rng))
            text = " ".join(words)
        elif r < 0.07:
            text = " ".join(persian.sentence(rng, max_words=4))
        else:
            n = rng.randint(40, 320)
            text = " ".join(dirty(rng, persian_text(rng, persian, n)))
            if rng.random() < 0.1:
                text = text.replace(". ", ".\n", 1)
        doc = {"id": "post-%06d" % i, "text": text,
               "meta": {"source": "blog-%03d" % rng.randint(1, 120),
                        "date": "13%02d-%02d-%02d" % (rng.randint(85, 99), rng.randint(1, 12),
                                                      rng.randint(1, 29))}}
        line = json.dumps(doc, ensure_ascii=False)
        size += len(line.encode("utf-8")) + 1
        docs.append(line)
    return docs


def dataset(rng, chain, n, fields, lengths):
    out = []
    for _ in range(n):
        rec = {}
        for field, (lo, hi) in zip(fields, lengths):
            rec[field] = " ".join(persian_text(rng, chain, rng.randint(lo, hi)))
        out.append(json.dumps(rec, ensure_ascii=False))
    return out


def write(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(ROOT, "tests", "data"))
    args = ap.parse_args()
    rng = random.Random(1402)

    persian_lines = read_lines("persian_train.txt") + read_lines("persian_heldout.txt") + \
        sentences(EXTRA_PERSIAN)
    arabic_lines = read_lines("arabic_heldout.txt") + sentences(ARABIC_EXTRA)
    persian = Chain(persian_lines)
    arabic = Chain(arabic_lines)

    write(os.path.join(args.out, "fixture_corpus.jsonl"),
          blog_corpus(rng, persian, arabic, 1_000_000))

    tokstats = os.path.join(args.out, "tokstats")
    os.makedirs(tokstats, exist_ok=True)
    write(os.path.join(tokstats, "sentiment.jsonl"),
          dataset(rng, persian, 200, ["text"], [(4, 30)]))
    write(os.path.join(tokstats, "nli.jsonl"),
          dataset(rng, persian, 151, ["premise", "hypothesis"], [(10, 40), (4, 15)]))
    write(os.path.join(tokstats, "qa.jsonl"),
          dataset(rng, persian, 120, ["question", "context"], [(4, 12), (40, 160)]))
    write(os.path.join(tokstats, "news.jsonl"),
          dataset(rng, persian, 75, ["text"], [(30, 200)]))
    write(os.path.join(tokstats, "short.jsonl"),
          dataset(rng, persian, 64, ["text"], [(1, 8)]))


if __name__ == "__main__":
    main()
