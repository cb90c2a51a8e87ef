"""Rendering for evaluation and training outputs: delimited tables plus
matplotlib figures written next to them."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_ordering_csv(report: dict, path) -> None:
    """One row per evaluated document: id, sentence count, bigram accuracy."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "n", "accuracy"])
        for row in report["documents"]:
            writer.writerow([row["id"], row["n"], row["accuracy"]])


def plot_ordering_accuracy(report: dict, path) -> None:
    """Bar chart of per-document accuracy with the mean as a reference line."""
    documents = report["documents"]
    accuracies = [row["accuracy"] for row in documents]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.25 * len(documents)), 4.0))
    ax.bar(range(len(documents)), accuracies, color="#4878b0")
    ax.axhline(
        report["mean_accuracy"],
        color="#c44e52",
        linestyle="--",
        label=f"mean = {report['mean_accuracy']:.3f}",
    )
    ax.set_xlabel("document")
    ax.set_ylabel("bigram accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"{report['model']} / {report['decoder']} decoder")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_loss_csv(losses, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch", "loss"])
        for epoch, loss in enumerate(losses, start=1):
            writer.writerow([epoch, loss])


def plot_loss_curve(losses, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(range(1, len(losses) + 1), losses, marker="o", color="#4878b0")
    ax.set_xlabel("epoch")
    ax.set_ylabel("average loss")
    ax.set_title("pair classification loss")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
