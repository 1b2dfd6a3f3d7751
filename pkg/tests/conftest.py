import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kglb.graph_store import Graph, IngestManifest, ingest

DATA_DIR = Path(__file__).parent / "data"

# Seeding order reproducing the worked example's label numbering:
# FEMALE=1, chess=2, golf=3, dance=4, business=5, Gender=6, Interest=7, MALE=8
WIKI_SEED = ["FEMALE", "chess", "golf", "dance", "business", "Gender", "Interest", "MALE"]


@pytest.fixture(scope="session")
def wiki_manifest() -> IngestManifest:
    return IngestManifest.load(DATA_DIR / "wiki" / "manifest.json")


@pytest.fixture
def wiki_graph(wiki_manifest) -> Graph:
    return ingest(wiki_manifest)
