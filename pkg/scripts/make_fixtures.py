#!/usr/bin/env python3
"""Regenerate the bundled fixtures (dataset, mock script, reference, registry seed).

The fixtures are checked in; this script exists so they can be rebuilt
deterministically when the dataset design changes:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from entitymatch.dataset import COLUMNS  # noqa: E402
from entitymatch.models import default_case_id  # noqa: E402

FIXTURES = ROOT / "fixtures"

EQUAL = "Equal"
DIFFERENT = "Different"
UNSURE = "Unsure - this could be a renamed entity, please check manually."

# (declared, official, legal_form_code, abbreviation, identifier, result, mock)
# official == "" means the register has no current name for the filing.
SPECIAL_ROWS = [
    # Declared/official pairs whose legal forms agree through all three signals.
    ("BRENNTAG PORUTGAL - PRODUTOS QUIMICOS, LTDA",
     "BRENNTAG PORUTGAL - PRODUTOS QUIMICOS, LDA",
     "PT101", "LTDA", "500200301", "Accepted", EQUAL),
    ("SILVER HORSE SA",
     "SILVER HORSE, S.A.",
     "PT102", "SA", "500200302", "Accepted", EQUAL),
    ("VMAXPARTS, UNIPESSOAL LDA",
     "VMAXPARTS, UNIPESSOAL, LDA",
     "PT104", "UNIPESSOAL", "500200303", "Accepted", EQUAL),
    ("SOLARSHOP, UNIPESSOAL LDA",
     "SOLARSHOP, UNIPESSOAL, LDA",
     "PT104", "UNIPESSOAL", "500200304", "Accepted", EQUAL),
    # Abbreviated declaration against the fully spelled register entry.
    ("PASTIGEST IND E COM PASTELARIA DOCARIA BISCOIT E GELADOS SA",
     "PASTIGEST - INDÚSTRIA E COMÉRCIO DE PASTELARIA, DOÇARIA, BISCOITOS E GELADOS, S.A.",
     "PT102", "SA", "500200305", "Accepted", EQUAL),
    # The backend cannot decide these two; they must land in the review queue.
    ("GRANITOS DO MINHO LDA",
     "GRANITOS E MARMORES DO MINHO, LDA",
     "PT101", "LDA", "500200306", "Accepted", UNSURE),
    ("FARMACIA MODERNA DO PORTO SA",
     "FARMACIA MODERNA PORTUENSE, S.A.",
     "PT102", "SA", "500200307", "Accepted", UNSURE),
    # Register knows only prior names (the entity was renamed).
    ("NOVA LUMIAR CAFE LDA",
     "",
     "PT101", "LDA", "500200308", "Accepted", EQUAL),
    # Dataset has no register name; the reference source fills it by identifier.
    ("FABRICA DE PAPEL DO AVE SA",
     "",
     "PT102", "SA", "505222333", "Accepted", EQUAL),
    # Clear non-matches.
    ("ALTRAD PREFAL",
     "LTRAD SERVICES INDUSTRIE, UNIPESSOAL LDA",
     "", "", "500200310", "Rejected", DIFFERENT),
    ("CONSTRUCOES MARTINS E FILHOS LDA",
     "TRANSPORTES RODOVIARIOS DO NORTE, LDA",
     "PT101", "LDA", "500200311", "Rejected", DIFFERENT),
    ("PADARIA CENTRAL DE BRAGA LDA",
     "METALURGICA DO CAVADO, S.A.",
     "PT101", "LDA", "500200312", "Rejected", DIFFERENT),
    # Name matches but the declared legal form contradicts the register.
    ("METALOMECANICA DO TEJO SA",
     "METALOMECANICA DO TEJO, LDA",
     "PT102", "SA", "500200313", "Rejected", EQUAL),
    # No register entry anywhere: undecidable without a human.
    ("SIMBOLO II - ATIVIDADES IMOBILIARIAS, LDA",
     "",
     "PT101", "LDA", "500200314", "Rejected", None),
    # Already registered: by identifier, and by normalized name.
    ("EMPRESA GERAL DE CIMENTOS SA",
     "EMPRESA GERAL DE CIMENTOS, S.A.",
     "PT102", "SA", "500100200", "Accepted", None),
    ("TRANSPORTES LUSITANIA LDA",
     "",
     "PT101", "LDA", "", "Accepted", None),
]

# 47 ordinary accepted rows: declared text is the register name with commas
# and accents typed away, sometimes LTDA for LDA.
GENERIC_STEMS = [
    ("ATLANTICO AZUL PESCAS", "LDA"),
    ("CERAMICA DE AVEIRO", "SA"),
    ("VINHOS DO DAO ENCOSTA", "LDA"),
    ("MOBILIARIO PAREDES IRMAOS", "LDA"),
    ("TEXTEIS DO MINHO NOVA FIACAO", "SA"),
    ("CALCADO DE FELGUEIRAS PASSO CERTO", "LDA"),
    ("CORTICA ALENTEJANA MONTADO", "SA"),
    ("PANIFICADORA DO MONDEGO", "LDA"),
    ("CONSERVAS DO ATLANTICO MATOSINHOS", "SA"),
    ("QUINTA DA RIBEIRA AGRICOLA", "UNIP"),
    ("ELECTRO MONTAGENS DE LEIRIA", "LDA"),
    ("SERRALHARIA MODERNA DE GUIMARAES", "LDA"),
    ("TIPOGRAFIA CENTRAL DE COIMBRA", "LDA"),
    ("LATICINIOS DA SERRA DA ESTRELA", "SA"),
    ("AZEITES DO RIBATEJO LAGAR NOVO", "LDA"),
    ("MARMORES DE ESTREMOZ PEDRA VIVA", "SA"),
    ("PLASTICOS DO OESTE EMBALAGEM", "LDA"),
    ("REDES E CORDOARIA DA POVOA", "LDA"),
    ("ESTALEIROS DO TEJO REPARACAO NAVAL", "SA"),
    ("FRUTAS DO OESTE POMAR DIRETO", "LDA"),
    ("CAFES TORREFACAO DE LISBOA", "SA"),
    ("DROGARIA E FERRAGENS DO BONFIM", "LDA"),
    ("IMOBILIARIA VALE DO SOUSA", "UNIP"),
    ("TRANSPORTES FRIGORIFICOS DO SADO", "LDA"),
    ("AGENCIA DE VIAGENS HORIZONTE", "SA"),
    ("LIVRARIA ACADEMICA DO PORTO", "LDA"),
    ("OTICA CENTRAL DE SETUBAL", "LDA"),
    ("CLINICA VETERINARIA DO ALTO MINHO", "UNIP"),
    ("JARDINS E PAISAGISMO DO SUL", "LDA"),
    ("INFORMATICA E SISTEMAS DO VOUGA", "SA"),
    ("SEGURANCA ELECTRONICA IBERICA", "LDA"),
    ("CATERING E EVENTOS DO ESTORIL", "LDA"),
    ("LAVANDARIA INDUSTRIAL DO CACEM", "UNIP"),
    ("RECICLAGEM E AMBIENTE DO CENTRO", "SA"),
    ("FERRAMENTAS E ABRASIVOS DO NORTE", "LDA"),
    ("VIDROS E ESPELHOS DE GONDOMAR", "LDA"),
    ("TINTAS E VERNIZES DO ATLANTICO", "SA"),
    ("BRINQUEDOS EDUCATIVOS LUSOS", "LDA"),
    ("APICULTURA DA BEIRA INTERIOR", "UNIP"),
    ("PEIXARIA MODERNA DA NAZARE", "LDA"),
    ("RELOJOARIA E OURIVESARIA REAL", "LDA"),
    ("CARPINTARIA MECANICA DO LIMA", "LDA"),
    ("ISOLAMENTOS TERMICOS DO TAMEGA", "SA"),
    ("PAPELARIA ESCOLAR DO AREEIRO", "LDA"),
    ("EQUIPAMENTOS HOTELEIROS DO ALGARVE", "SA"),
    ("MERCEARIA FINA DE CAMPO DE OURIQUE", "LDA"),
    ("ANTENAS E TELECOMUNICACOES DO MAR", "LDA"),
]

FORM_FIELDS = {
    "LDA": ("PT101", "LDA", "LDA", ", LDA"),
    "SA": ("PT102", "SA", "SA", ", S.A."),
    "UNIP": ("PT104", "UNIPESSOAL", "UNIPESSOAL LDA", ", UNIPESSOAL, LDA"),
}


def build_rows() -> tuple[list[list[str]], dict[str, str]]:
    rows: list[list[str]] = []
    mock: dict[str, str] = {}
    sectors = ["Manufacturing", "Wholesale", "Retail", "Construction", "Services"]
    banks = ["BANK01", "BANK02", "BANK03"]

    def add(declared, official, code, abbrev, identifier, result, response, sector, bank):
        case_id = default_case_id("PT", declared, identifier)
        if response is not None:
            mock[case_id] = response
        rows.append([
            "PT", declared, bank, identifier, "NIF" if identifier else "",
            "", sector, code, abbrev, official, "", result,
        ])

    for i, row in enumerate(SPECIAL_ROWS):
        declared, official, code, abbrev, identifier, result, response = row
        add(declared, official, code, abbrev, identifier, result, response,
            sectors[i % len(sectors)], banks[i % len(banks)])

    for i, (stem, form) in enumerate(GENERIC_STEMS):
        code, abbrev, declared_suffix, official_suffix = FORM_FIELDS[form]
        declared = f"{stem} {declared_suffix}"
        official = f"{stem}{official_suffix}"
        identifier = f"5093{i:05d}"
        add(declared, official, code, abbrev, identifier, "Accepted", EQUAL,
            sectors[i % len(sectors)], banks[i % len(banks)])

    # The renamed entity: register carries only prior names.
    for row in rows:
        if row[1] == "NOVA LUMIAR CAFE LDA":
            row[10] = "LUMIAR CAFE E PASTELARIA, LDA|NOVA LUMIAR CAFE, LDA"
    return rows, mock


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    rows, mock = build_rows()

    import csv

    with (FIXTURES / "dataset.csv").open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(rows)

    (FIXTURES / "mock_responses.json").write_text(
        json.dumps(mock, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    reference = {
        "by_identifier": {
            "PT:505222333": {
                "official_name": "FÁBRICA DE PAPEL DO AVE, S.A.",
                "previous_names": [],
            }
        },
        "by_name": {},
    }
    (FIXTURES / "reference.json").write_text(
        json.dumps(reference, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    seed_events = [
        {"event": "register", "code": "PT0000101", "country": "PT",
         "identifier": "500100200", "name": "EMPRESA GERAL DE CIMENTOS SA",
         "ts": "1969-12-31T00:00:00Z"},
        {"event": "register", "code": "PT0000102", "country": "PT",
         "identifier": "", "name": "TRANSPORTES LUSITANIA LDA",
         "ts": "1969-12-31T00:00:01Z"},
    ]
    (FIXTURES / "registry_seed.jsonl").write_text(
        "\n".join(json.dumps(event, sort_keys=True) for event in seed_events) + "\n",
        encoding="utf-8",
    )

    config = """\
# Demonstration run over the bundled fixtures.
input: dataset.csv
run:
  out_dir: run_output
  seed: 7
  concurrency: 4
  decider: mock-zsc
thresholds:
  accept_at: 0.95
  reject_below: 0.80
vectorizer:
  mode: char_ngram
  n: 2
backends:
  - name: levenshtein
    kind: distance_threshold
  - name: cosine
    kind: distance_threshold
  - name: jaccard
    kind: distance_threshold
  - name: mock-zsc
    kind: mock
    script: mock_responses.json
reference:
  kind: fixture
  path: reference.json
registry:
  seed_log: registry_seed.jsonl
"""
    (FIXTURES / "config.yaml").write_text(config, encoding="utf-8")

    accepted = sum(1 for row in rows if row[11] == "Accepted")
    rejected = sum(1 for row in rows if row[11] == "Rejected")
    print(f"dataset: {len(rows)} rows ({accepted} Accepted, {rejected} Rejected)")
    print(f"mock responses: {len(mock)}")


if __name__ == "__main__":
    main()
