"""Corpus-to-classifier pipeline for sensitive-topic short texts.

Subpackages cover the full workflow: rule-based candidate filtering
(:mod:`goldsift.corpus`), multi-annotator label ingestion and gold-label
construction (:mod:`goldsift.annotation`), deterministic text preparation
(:mod:`goldsift.textprep`), class-weighted linear SVM training
(:mod:`goldsift.svm`), evaluation with AUC-driven model selection
(:mod:`goldsift.evaluation`), an expert adjudication service
(:mod:`goldsift.adjudication`, :mod:`goldsift.service`), and a CLI
(:mod:`goldsift.cli`).
"""

__version__ = "0.1.0"
