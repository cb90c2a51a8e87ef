"""Command line entry points for the essay planning pipeline."""

from __future__ import annotations

import json
import pathlib

import click

from .coherence import (
    CoherenceModel,
    RecnnTrainConfig,
    load_recnn_params,
    save_recnn_params,
    train_recnn,
)
from .corpus import ingest_corpus, save_corpus, split_holdout
from .embeddings import SkipgramConfig, load_embeddings, save_embeddings, train_skipgram
from .lda import load_lda, save_lda, train_lda
from .ordering import evaluate_holdout
from .pipeline import generate_essay, load_pipeline_config, load_resources
from .report import (
    plot_loss_curve,
    plot_ordering_accuracy,
    write_loss_csv,
    write_ordering_csv,
)
from .selection import SelectionConfig, load_stopwords, select_sentences
from .thesaurus import ThesExpansionConfig, load_thesaurus
from .topics import ClusterConfig, cluster_arguments, expand_topic


def _dump_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, ensure_ascii=False, indent=2)
        handle.write("\n")


@click.group()
def main():
    """Plan and assemble extractive essays from a sentence corpus."""


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the validated corpus back out (normalized).")
def ingest(corpus_path, out):
    """Validate a corpus file and print its statistics."""
    corpus = ingest_corpus(corpus_path)
    click.echo(f"documents: {len(corpus.documents)}")
    click.echo(f"sentences: {corpus.num_sentences}")
    click.echo(f"vocabulary: {len(corpus.vocabulary)}")
    if out:
        save_corpus(corpus, out)
        click.echo(f"wrote {out}")


@main.command("train-embeddings")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False))
@click.option("--dim", default=50, show_default=True)
@click.option("--window", default=5, show_default=True)
@click.option("--negatives", default=5, show_default=True)
@click.option("--epochs", default=10, show_default=True)
@click.option("--learning-rate", default=0.025, show_default=True)
@click.option("--min-count", default=1, show_default=True)
@click.option("--seed", default=1, show_default=True)
def train_embeddings(corpus_path, out, dim, window, negatives, epochs,
                     learning_rate, min_count, seed):
    """Train skipgram word vectors on a corpus."""
    corpus = ingest_corpus(corpus_path)
    config = SkipgramConfig(
        dim=dim, window=window, negatives=negatives, epochs=epochs,
        learning_rate=learning_rate, min_count=min_count, seed=seed,
    )
    table = train_skipgram(corpus, config)
    save_embeddings(table, out)
    click.echo(f"trained {len(table)} vectors of dimension {table.dim} -> {out}")


@main.command("train-lda")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False))
@click.option("--topics", "-k", default=10, show_default=True)
@click.option("--alpha", default=None, type=float,
              help="Document-topic prior; defaults to 50/topics.")
@click.option("--beta", default=0.01, show_default=True)
@click.option("--iterations", default=500, show_default=True)
@click.option("--seed", default=1, show_default=True)
def train_lda_command(corpus_path, out, topics, alpha, beta, iterations, seed):
    """Train a topic model by collapsed Gibbs sampling."""
    corpus = ingest_corpus(corpus_path)
    model = train_lda(
        corpus, num_topics=topics, alpha=alpha, beta=beta,
        iterations=iterations, seed=seed,
    )
    save_lda(model, out)
    click.echo(
        f"trained {model.num_topics} topics over {len(model.vocabulary)} words "
        f"-> {out}"
    )


@main.command("train-coherence")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("embeddings_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False))
@click.option("--learning-rate", default=0.05, show_default=True)
@click.option("--epochs", default=20, show_default=True)
@click.option("--hidden-size", default=20, show_default=True)
@click.option("--negatives", default=1, show_default=True)
@click.option("--seed", default=1, show_default=True)
def train_coherence(corpus_path, embeddings_path, out, learning_rate, epochs,
                    hidden_size, negatives, seed):
    """Train the recursive coherence scorer; writes the loss curve next to
    the parameter file."""
    corpus = ingest_corpus(corpus_path)
    table = load_embeddings(embeddings_path)
    config = RecnnTrainConfig(
        learning_rate=learning_rate, epochs=epochs, hidden_size=hidden_size,
        negatives_per_positive=negatives, seed=seed,
    )
    params, losses = train_recnn(corpus, table, config)
    save_recnn_params(params, out)
    base = pathlib.Path(out)
    write_loss_csv(losses, base.with_suffix(base.suffix + ".loss.csv"))
    plot_loss_curve(losses, base.with_suffix(base.suffix + ".loss.png"))
    click.echo(f"wrote {out} (final epoch loss {losses[-1]:.4f})")


@main.command()
@click.argument("topic")
@click.option("--backend", type=click.Choice(["thes", "tm", "we"]), default="we",
              show_default=True)
@click.option("-k", default=20, show_default=True, help="Words to retain.")
@click.option("--thesaurus", type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False))
@click.option("--lda", type=click.Path(exists=True, dir_okay=False))
@click.option("--depth", default=1, show_default=True,
              help="Expansion rounds for the thesaurus backend.")
def expand(topic, backend, k, thesaurus, embeddings, lda, depth):
    """Expand a topic word into scored related words."""
    scored = expand_topic(
        topic, backend, k,
        thesaurus=load_thesaurus(thesaurus) if thesaurus else None,
        thes_config=ThesExpansionConfig(depth=depth),
        lda_model=load_lda(lda) if lda else None,
        table=load_embeddings(embeddings) if embeddings else None,
    )
    for word, score in scored:
        click.echo(f"{word}\t{score}")


@main.command()
@click.argument("words", nargs=-1, required=True)
@click.option("--representation", type=click.Choice(["tm", "we"]), default="we",
              show_default=True)
@click.option("--algorithm", type=click.Choice(["kmeans", "affinity_propagation"]),
              default="kmeans", show_default=True)
@click.option("-k", default=3, show_default=True, help="Cluster count for kmeans.")
@click.option("--damping", default=0.9, show_default=True)
@click.option("--preference", default="median", show_default=True)
@click.option("--min-cluster-size", default=3, show_default=True)
@click.option("--max-iterations", default=200, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False))
@click.option("--lda", type=click.Path(exists=True, dir_okay=False))
def cluster(words, representation, algorithm, k, damping, preference,
            min_cluster_size, max_iterations, seed, embeddings, lda):
    """Cluster words into arguments and print them."""
    config = ClusterConfig(
        algorithm=algorithm, k=k, damping=damping,
        preference=preference if preference == "median" else float(preference),
        min_cluster_size=min_cluster_size, max_iterations=max_iterations,
        seed=seed,
    )
    arguments = cluster_arguments(
        list(words), representation, config,
        table=load_embeddings(embeddings) if embeddings else None,
        lda_model=load_lda(lda) if lda else None,
    )
    if not arguments:
        click.echo("no cluster reached min_cluster_size")
        return
    for argument in arguments:
        joined = " ".join(argument.supporting_words)
        click.echo(f"argument {argument.id} ({len(argument.supporting_words)}): {joined}")


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("words", nargs=-1, required=True)
@click.option("--method", type=click.Choice(["counting", "embedding"]),
              default="counting", show_default=True)
@click.option("--top-k", default=10, show_default=True)
@click.option("--max-per-document", default=2, show_default=True)
@click.option("--min-sentence-tokens", default=1, show_default=True)
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False))
@click.option("--stopwords", type=click.Path(exists=True, dir_okay=False))
def select(corpus_path, words, method, top_k, max_per_document,
           min_sentence_tokens, embeddings, stopwords):
    """Rank corpus sentences against a supporting word set."""
    corpus = ingest_corpus(corpus_path)
    config = SelectionConfig(
        method=method, top_k=top_k, max_per_document=max_per_document,
        min_sentence_tokens=min_sentence_tokens,
        stopwords=load_stopwords(stopwords) if stopwords else frozenset(),
    )
    table = load_embeddings(embeddings) if embeddings else None
    for item in select_sentences(set(words), corpus, config, table):
        sentence = item.sentence
        click.echo(f"{item.score}\t{sentence.doc_id}[{sentence.index}]\t{sentence.raw}")


@main.command()
@click.argument("topic")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", "trace_path", default="trace.json", show_default=True,
              type=click.Path(dir_okay=False))
def generate(topic, config_path, trace_path):
    """Generate an essay for a topic and write the trace report."""
    config = load_pipeline_config(config_path)
    essay, trace = generate_essay(topic, config)
    _dump_json(trace, trace_path)
    click.echo(essay.text(), nl=False)


@main.command("eval-ordering")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "variant",
              type=click.Choice(["bow_boolean", "bow_frequency", "embed_average",
                                 "recursive_nn"]),
              default="bow_boolean", show_default=True)
@click.option("--decoder", type=click.Choice(["greedy", "dp", "beam"]),
              default="dp", show_default=True)
@click.option("--beam-width", default=5, show_default=True)
@click.option("--pooling", type=click.Choice(["document", "bigram"]),
              default="document", show_default=True)
@click.option("--holdout-fraction", default=0.0, show_default=True,
              help="Evaluate on a held-out split instead of the whole corpus.")
@click.option("--seed", default=1, show_default=True, help="Holdout split seed.")
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False))
@click.option("--recnn", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default="ordering_report.json", show_default=True,
              type=click.Path(dir_okay=False))
def eval_ordering(corpus_path, variant, decoder, beam_width, pooling,
                  holdout_fraction, seed, embeddings, recnn, out):
    """Reorder held-out documents and report bigram accuracy; writes the JSON
    report plus a CSV table and an accuracy figure beside it."""
    corpus = ingest_corpus(corpus_path)
    if holdout_fraction > 0.0:
        _, corpus = split_holdout(corpus, holdout_fraction, seed)
    table = load_embeddings(embeddings) if embeddings else None
    params = None
    if variant == "recursive_nn":
        if not recnn:
            raise click.UsageError("--model recursive_nn requires --recnn")
        params = load_recnn_params(recnn)
    model = CoherenceModel(variant=variant, params=params, table=table)
    report = evaluate_holdout(
        corpus, model, decoder=decoder, beam_width=beam_width, pooling=pooling
    )
    _dump_json(report, out)
    base = pathlib.Path(out)
    write_ordering_csv(report, base.with_suffix(".csv"))
    plot_ordering_accuracy(report, base.with_suffix(".png"))
    click.echo(
        f"mean bigram accuracy {report['mean_accuracy']:.4f} over "
        f"{len(report['documents'])} documents ({report['skipped']} skipped) -> {out}"
    )


if __name__ == "__main__":
    main()
