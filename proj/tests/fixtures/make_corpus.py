#!/usr/bin/env python3
"""Regenerates the fixture corpus: predictions.jsonl and forge/*.jsonl.

Outputs are crafted so the aggregate orderings against Qwen2.5-7B are known:
json-extract ETLCH-100 and ETLCH-300 win ROUGE-L and cosine but not parse
rate, ETLCH-500/1000 win all three; kge ETLCH-100 wins ROUGE-L only,
ETLCH-300 ties; ner ETLCH-100 ties, the rest win both.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
N = 10

NAMES = ["王小明", "陳美玲", "林志豪", "張雅婷", "李建國", "黃淑芬", "吳俊傑", "劉佳穎", "蔡明哲", "鄭雅文"]
OTHER = ["周杰倫", "蕭敬騰", "楊丞琳", "羅志祥", "謝金燕", "潘瑋柏", "郭富城", "黎明輝", "梁朝偉", "曾志偉"]
PLACES = ["台北市", "新竹縣", "台中市", "高雄市", "花蓮縣", "台南市", "宜蘭縣", "嘉義市", "屏東縣", "基隆市"]
FAR = ["東京都", "大阪府", "首爾市", "曼谷市", "河內市", "馬尼拉", "雅加達", "新加坡", "吉隆坡", "金邊市"]
ORGS = ["中央研究院", "台灣大學", "工業技術研究院", "衛生福利部", "國家圖書館",
        "故宮博物院", "交通大學", "清華大學", "成功大學", "政治大學"]
FOODS = ["糙米", "燕麥", "豆腐", "菠菜", "鮭魚", "堅果", "藍莓", "地瓜", "毛豆", "優格"]
BENEFITS = ["膳食纖維", "蛋白質", "維生素", "礦物質", "抗氧化物質", "好的脂肪", "鈣質", "鐵質", "葉酸", "益生菌"]

SEP = "－"


def dump(obj):
    return json.dumps(obj, ensure_ascii=False)


def json_reference(i):
    return dump({"人名": [NAMES[i]], "地點": [PLACES[i]], "日期": [f"2024年{i + 1}月{i + 3}日"]})


def json_wrong(i):
    return dump({"人名": [OTHER[i]], "地點": [FAR[i]], "日期": [f"2024年{i + 1}月{i + 3}日"]})


def truncated(text):
    return text[: len(text) * 2 // 3]


def kge_triples(i):
    return [
        (FOODS[i], "富含", BENEFITS[i]),
        (FOODS[i], "有助於", "控制血糖"),
        (NAMES[i], "喜歡吃", FOODS[i]),
        (NAMES[i], "居住於", PLACES[i]),
    ]


def kge_text(triples):
    return "\n".join(SEP.join(t) for t in triples)


def kge_reference(i):
    return kge_text(kge_triples(i))


def kge_reversed(i):
    return kge_text(list(reversed(kge_triples(i))))


def kge_one_wrong(i):
    t = kge_triples(i)
    t[3] = (NAMES[i], "居住於", FAR[i])
    return kge_text(t)


def ner_reference(i):
    return dump({"人名": [NAMES[i], OTHER[i]], "組織": [ORGS[i]], "地點": [PLACES[i]]})


def ner_dropped(i):
    return dump({"人名": [NAMES[i]], "組織": [ORGS[i]], "地點": [PLACES[i]]})


def ner_reordered(i):
    return dump({"地點": [PLACES[i]], "組織": [ORGS[i]], "人名": [OTHER[i], NAMES[i]]})


def plan():
    exact = {"json-extract": json_reference, "kge": kge_reference, "ner": ner_reference}

    def json_mix(n_exact):
        return lambda i: json_reference(i) if i < n_exact else truncated(json_reference(i))

    return {
        "json-extract": {
            ("Qwen2.5-7B", None): lambda i: json_wrong(i) if i < N - 1 else truncated(json_reference(i)),
            ("Llama-3.1-8B", None): lambda i: "```json\n" + json_reference(i) + "\n```",
            ("ETLCH", 100): json_mix(7),
            ("ETLCH", 300): json_mix(9),
            ("ETLCH", 500): exact["json-extract"],
            ("ETLCH", 1000): exact["json-extract"],
        },
        "kge": {
            ("Qwen2.5-7B", None): kge_reversed,
            ("Llama-3.1-8B", None): lambda i: kge_text(kge_triples(i)[:2]),
            ("ETLCH", 100): kge_one_wrong,
            ("ETLCH", 300): kge_reversed,
            ("ETLCH", 500): exact["kge"],
            ("ETLCH", 1000): exact["kge"],
        },
        "ner": {
            ("Qwen2.5-7B", None): ner_dropped,
            ("Llama-3.1-8B", None): ner_reordered,
            ("ETLCH", 100): ner_dropped,
            ("ETLCH", 300): lambda i: ner_reference(i) if i < 5 else ner_dropped(i),
            ("ETLCH", 500): exact["ner"],
            ("ETLCH", 1000): exact["ner"],
        },
    }, exact


def predictions():
    groups, exact = plan()
    lines = []
    for task, by_group in groups.items():
        for (model, size), make in by_group.items():
            for i in range(N):
                rec = {"schema_version": 1, "example_id": f"{task}-{i + 1:03d}", "task": task, "model": model}
                if size is not None:
                    rec["train_size"] = size
                rec["output_text"] = make(i)
                rec["reference_text"] = exact[task](i)
                lines.append(dump(rec))
    return "\n".join(lines) + "\n"


def article(i, task):
    return (f"{NAMES[i]}住在{PLACES[i]}，平日在{ORGS[i]}工作。"
            f"{NAMES[i]}每天早餐都會吃{FOODS[i]}，因為{FOODS[i]}富含{BENEFITS[i]}，也有助於控制血糖。"
            f"這篇文章整理了{task}任務所需的資訊。")


def forge_fixtures():
    out = {}
    rows = []
    for i in range(3):
        rows.append(dump({"task": "json-extract", "topic": f"健康飲食{i + 1}", "context": article(i, "抽取"),
                          "schema": [{"name": "人名", "description": "文中提到的人"},
                                     {"name": "地點", "description": "居住地"}, "食物"],
                          "gold_output": dump({"人名": [NAMES[i]], "地點": [PLACES[i]], "食物": [FOODS[i]]})}))
    out["json-extract.jsonl"] = rows
    rows = []
    for i in range(3):
        rows.append(dump({"task": "kge", "topic": f"飲食知識{i + 1}", "context": article(i, "知識圖譜"),
                          "gold_output": kge_text(kge_triples(i))}))
    out["kge.jsonl"] = rows
    rows = []
    for i in range(3):
        gold = dump({"人名": [NAMES[i]], "組織": [ORGS[i]], "地點": [PLACES[i]]})
        # the first topic needs a retry: its first answer nests a map
        golds = [dump({"人名": {"主角": NAMES[i]}}), gold] if i == 0 else gold
        rows.append(dump({"task": "ner", "topic": f"人物介紹{i + 1}", "context": article(i, "命名實體"),
                          "gold_output": golds}))
    out["ner.jsonl"] = rows
    return out


if __name__ == "__main__":
    (HERE / "predictions.jsonl").write_text(predictions(), encoding="utf-8")
    for name, rows in forge_fixtures().items():
        (HERE / "forge" / name).write_text("\n".join(rows) + "\n", encoding="utf-8")
