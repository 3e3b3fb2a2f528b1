"""stratex - negotiation strategy templates, executed and explained.

- Parse phased acceptance and bidding templates (parser.py)
- Run them under the alternating-offers protocol (engine/)
- Explain them in validated plain English for experts or laypeople
  (annotator.py, realizer.py, enrichment.py, validation.py, explainer.py)
"""

__version__ = "0.1.0"
