"""Topic discovery over PubMed literature on childhood speech disorders.

The package provides two modeling tracks over a shared, curated corpus:

* a probabilistic track: bag-of-words preparation, collapsed-Gibbs LDA,
  C_v coherence evaluation and topic-count selection;
* an embedding track: document embeddings reduced with UMAP, clustered
  with HDBSCAN, and summarized with class-based TF-IDF.

Both tracks emit the tabular/JSON data behind the usual diagnostics
(coherence sweep curve, intertopic distance map, similarity heatmap,
topic dendrogram) plus a side-by-side comparison report.
"""

from speechtopics.corpus import DocumentRecord, read_corpus_csv, write_corpus_csv
from speechtopics.pubmed import QuerySpec, FetchSession, EutilsClient, build_query
from speechtopics.curate import ChildKeywordSet, CurationReport, curate
from speechtopics.textprep import (
    TokenizerConfig,
    StopList,
    NgramConfig,
    Vocabulary,
    BowCorpus,
    tokenize,
    remove_stopwords,
    build_vocabulary,
    to_bow,
    ngram_counts,
)
from speechtopics.lda import LdaHyperparams, LdaModel, train, phi, theta, log_perplexity, top_words
from speechtopics.coherence import CoherenceConfig, SweepResult, cv_coherence, sweep
from speechtopics.embeddings import EmbeddingMatrix, load_embeddings, fallback_embed
from speechtopics.reduction import UmapConfig, FuzzyGraph, reduce_embeddings
from speechtopics.clustering import (
    HdbscanConfig,
    ClusterLabels,
    hdbscan_fit,
    outlier_ratio,
    reassign_outliers,
)
from speechtopics.representation import (
    ctfidf,
    topic_similarity,
    merge_similar,
    dendrogram,
    lda_intertopic_map,
)

__version__ = "0.1.0"
