"""Operator command line: ingest, caption, embed, evaluate, cluster, serve.

Every subcommand is a thin adapter over a module call; output is
deterministic given the workspace state. Exit codes: 0 success, 1 usage
error, 2 data error (bad files, missing artifacts), 3 provider error
(failures that survived retries).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from captionlens.cluster.labels import label_clusters
from captionlens.cluster.ordering import order_clusters
from captionlens.cluster.partition import cut
from captionlens.cluster.projection import project_2d
from captionlens.cluster.ward import ward_cluster
from captionlens.config import AppConfig, load_config
from captionlens.corpus.embeddings import write_embedding_file
from captionlens.corpus.manifest import Manifest
from captionlens.corpus.snapshot import CAPTION_SPACE
from captionlens.errors import DataError, ProviderError
from captionlens.ingest.pipeline import (
    caption_corpus,
    embed_corpus,
    import_vectors,
    scan_images,
)
from captionlens.ingest.providers import (
    CaptionProviderConfig,
    HttpCaptionProvider,
    HttpEmbeddingProvider,
    MockCaptionProvider,
    MockEmbeddingProvider,
    RetryPolicy,
)
from captionlens.ingest.resize import ResizeRule, compute_target_dimensions
from captionlens.similarity.metrics import overlap_metric, symmetry_metric
from captionlens.similarity.recommend import top_n
from captionlens.textlab.keyness import label_recommendation_set
from captionlens.textlab.phrases import NeutralizationLexicon
from captionlens.textlab.stats import caption_stats
from captionlens.workspace import Workspace

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- mock caption text ---------------------------------------------------

_MOCK_ADJECTIVES = (
    "weathered", "busy", "quiet", "industrial", "sunlit", "crowded",
    "narrow", "wide", "tall", "old",
)
_MOCK_SUBJECTS = (
    "warehouse", "bridge", "streetcar", "market", "harbor", "factory",
    "crane", "office", "storefront", "station", "park", "crowd",
)
_MOCK_SETTINGS = (
    "waterfront", "intersection", "railway yard", "city block",
    "avenue", "construction site", "riverbank", "plaza",
)


def _mock_caption_text(image_id: str) -> str:
    """Deterministic varied caption used when no scripted text exists."""
    digest = hashlib.blake2b(image_id.encode("utf-8"), digest_size=8).digest()
    pick = int.from_bytes(digest, "little")
    adj = _MOCK_ADJECTIVES[pick % len(_MOCK_ADJECTIVES)]
    subject = _MOCK_SUBJECTS[(pick >> 8) % len(_MOCK_SUBJECTS)]
    other = _MOCK_SUBJECTS[(pick >> 16) % len(_MOCK_SUBJECTS)]
    setting = _MOCK_SETTINGS[(pick >> 24) % len(_MOCK_SETTINGS)]
    hedge = "appears to show" if pick % 3 == 0 else "shows"
    return (
        f"The photograph {hedge} a {adj} {subject} near a {other} "
        f"at a {setting}."
    )


# -- provider construction -------------------------------------------------


def _caption_setup(config: AppConfig):
    provider_config = CaptionProviderConfig(
        endpoint=config.caption_endpoint,
        model_id=config.caption_model,
        prompt=config.caption_prompt,
        max_tokens=config.caption_max_tokens,
        max_concurrency=config.max_concurrency,
        retry=RetryPolicy(config.retry_max_attempts, config.retry_base_seconds),
    )
    if config.provider == "mock":
        scripted = {}
        if config.mock_captions_file:
            path = Path(config.mock_captions_file)
            if not path.exists():
                raise DataError(f"mock captions file not found: {path}")
            try:
                scripted = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path} is not valid JSON: {exc}") from exc
            if not isinstance(scripted, dict):
                raise DataError(f"{path} must hold a JSON object of id to caption text")
        provider = MockCaptionProvider(
            captions=scripted,
            default_text=_mock_caption_text,
            model_id=config.caption_model,
        )
        return provider, provider_config
    return HttpCaptionProvider(provider_config, api_key_env=config.caption_api_key_env), provider_config


def _embedding_provider(config: AppConfig):
    if config.provider == "mock":
        return MockEmbeddingProvider(config.embedding_dimension, seed=config.mock_seed)
    return HttpEmbeddingProvider(
        endpoint=config.embedding_endpoint,
        model_id=config.embedding_model,
        dimension=config.embedding_dimension,
        api_key_env=config.embedding_api_key_env,
    )


# -- option helpers --------------------------------------------------------


def _positive_int(value: str) -> int:
    try:
        parsed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if parsed < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {parsed}")
    return parsed


def _n_list(value: str) -> list[int]:
    out = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        out.append(_positive_int(part))
    if not out:
        raise argparse.ArgumentTypeError("expected a comma-separated list of positive integers")
    return out


def _print_json(payload) -> None:
    json.dump(payload, sys.stdout, ensure_ascii=False, indent=2)
    sys.stdout.write("\n")


# -- subcommands -----------------------------------------------------------


def _cmd_ingest(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    rule = ResizeRule(config.resize_max_long, config.resize_max_short)
    scanned = scan_images(config.image_root)
    added = len(scanned)
    if ws.has_manifest():
        existing = ws.read_manifest()
        known = {r.id for r in existing.records}
        fresh = [r for r in scanned.records if r.id not in known]
        added = len(fresh)
        records = sorted(existing.records + fresh, key=lambda r: r.id)
        manifest = Manifest(records, existing.captions)
    else:
        manifest = scanned
    ws.write_manifest(manifest)

    oversized = 0
    for record in manifest.records:
        if record.width_px and record.height_px:
            target = compute_target_dimensions(record.width_px, record.height_px, rule)
            if target != (record.width_px, record.height_px):
                oversized += 1
    payload = {
        "images": len(manifest),
        "added": added,
        "will_downscale": oversized,
        "manifest": str(ws.manifest_path),
    }
    if args.json:
        _print_json(payload)
    else:
        print(f"manifest holds {payload['images']} images ({added} new)")
        print(f"{oversized} will be downscaled to fit {rule.max_long_side}x{rule.max_short_side}")
    return EXIT_OK


def _cmd_caption(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    manifest = ws.read_manifest()
    provider, provider_config = _caption_setup(config)
    rule = ResizeRule(config.resize_max_long, config.resize_max_short)
    report = caption_corpus(
        manifest,
        provider,
        provider_config,
        config.image_root,
        rule=rule,
        persist=lambda: ws.write_manifest(manifest, bump=False),
    )
    ws.write_manifest(manifest)
    if args.json:
        _print_json(report.to_dict())
    else:
        print(
            f"captioned {report.succeeded} of {report.processed} pending images "
            f"({report.rejected} rejected, {len(report.failed)} failed, "
            f"{report.skipped} already done)"
        )
    if report.failed:
        for image_id in report.failed:
            print(f"error: captioning failed for {image_id}", file=sys.stderr)
        return EXIT_PROVIDER
    return EXIT_OK


def _cmd_embed(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    manifest = ws.read_manifest()
    provider = _embedding_provider(config)
    existing = None
    if ws.space_path(CAPTION_SPACE).exists():
        existing = ws.read_space(CAPTION_SPACE)
    lexicon = NeutralizationLexicon.default() if args.neutralize else None
    space, report = embed_corpus(
        manifest,
        provider,
        space_name=CAPTION_SPACE,
        neutralization=lexicon,
        existing=existing,
        retry=RetryPolicy(config.retry_max_attempts, config.retry_base_seconds),
        persist=lambda s: ws.write_space(s, bump=False),
    )
    ws.write_space(space, bump=False)
    ws.write_manifest(manifest)
    if args.json:
        _print_json(report.to_dict())
    else:
        print(
            f"embedded {report.succeeded} captions into space {space.name!r} "
            f"(dimension {space.dimension}, {len(space)} vectors total)"
        )
    if report.failed:
        for image_id in report.failed:
            print(f"error: embedding failed for {image_id}", file=sys.stderr)
        return EXIT_PROVIDER
    return EXIT_OK


def _cmd_import_vectors(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    manifest = ws.read_manifest()
    space = import_vectors(manifest, args.file, args.space)
    ws.write_space(space)
    if args.json:
        _print_json({"space": space.name, "vectors": len(space), "dimension": space.dimension})
    else:
        print(f"imported {len(space)} vectors into space {space.name!r} (dimension {space.dimension})")
    return EXIT_OK


def _cmd_recommend(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    rec = top_n(snapshot, args.image_id, args.n, space_name=args.space)
    rec = label_recommendation_set(snapshot, rec)
    if args.json:
        _print_json(rec.to_dict())
        return EXIT_OK
    print(f"neighbors of {rec.seed_id} in space {rec.space_name!r}:")
    for rank, (image_id, score) in enumerate(rec.neighbors, start=1):
        print(f"{rank:3d}. {score:.4f}  {image_id}")
    if rec.explanation_terms:
        print("shared terms: " + ", ".join(rec.explanation_terms))
    return EXIT_OK


def _cmd_evaluate(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    reports = ws.read_reports()
    if args.metric == "symmetry":
        report = symmetry_metric(snapshot, args.space, args.n)
        reports.setdefault("symmetry", {})[args.space] = report.to_dict()
    else:
        names = [part.strip() for part in args.spaces.split(",") if part.strip()]
        if len(names) != 2:
            raise UsageError("evaluate overlap: --spaces needs exactly two comma-separated names")
        report = overlap_metric(snapshot, names[0], names[1], args.n)
        reports.setdefault("overlap", {})[f"{names[0]}|{names[1]}"] = report.to_dict()
    ws.write_reports(reports)
    if args.json:
        _print_json(report.to_dict())
    else:
        print(report.to_table())
    return EXIT_OK


def _cmd_cluster(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    space = snapshot.require_space(CAPTION_SPACE)
    dendrogram = ward_cluster(space, mode=args.mode)
    assignment = cut(dendrogram, args.k, space.ids)
    positions = order_clusters(dendrogram, assignment, space)
    assignment = assignment.with_order(positions)
    embedding = project_2d(space)
    ws.write_dendrogram(dendrogram)
    ws.write_clusters(assignment)
    ws.write_projection(embedding)
    sizes = sorted((s.size for s in assignment.summaries), reverse=True)
    if args.json:
        _print_json(
            {
                "k": assignment.k,
                "images": len(space),
                "largest": sizes[0],
                "smallest": sizes[-1],
            }
        )
    else:
        print(
            f"clustered {len(space)} images into {assignment.k} clusters "
            f"(sizes {sizes[-1]}..{sizes[0]}); projection saved"
        )
    return EXIT_OK


def _cmd_label(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    assignment = snapshot.require_clusters()
    labeled = label_clusters(snapshot, assignment)
    ws.write_clusters(labeled)
    if args.json:
        _print_json(labeled.to_dict())
    else:
        print(_cluster_table(labeled))
    return EXIT_OK


def _cluster_table(assignment) -> str:
    rows = [("ID", "Description", "Photos")]
    for summary in assignment.ordered_summaries():
        rows.append(
            (
                str(summary.cluster_id),
                "; ".join(summary.terms) if summary.terms else "(unlabeled)",
                str(summary.size),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(3)]
    lines = []
    for row in rows:
        lines.append(
            f"{row[0]:>{widths[0]}}  {row[1]:<{widths[1]}}  {row[2]:>{widths[2]}}"
        )
    return "\n".join(lines)


def _cmd_stats(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    captions = list(snapshot.captions.values())
    caption_block = None
    if len(captions) >= 2:
        caption_block = caption_stats(captions).to_dict()
    payload = {
        "overview": snapshot.overview(),
        "captions": caption_block,
        "reports": dict(snapshot.reports or {}),
    }
    if args.json:
        _print_json(payload)
        return EXIT_OK
    overview = payload["overview"]
    print(f"images: {overview['image_count']} (version {overview['version']})")
    for status, count in sorted(overview["status_counts"].items()):
        print(f"  {status}: {count}")
    for name, info in overview["spaces"].items():
        print(f"space {name!r}: {info['vector_count']} vectors, dimension {info['dimension']}")
    if overview["cluster_count"]:
        print(f"clusters: {overview['cluster_count']}")
    if caption_block:
        print(
            f"captions: {caption_block['caption_count']}, "
            f"tokens {caption_block['token_mean']:.1f} (sd {caption_block['token_sd']:.1f}), "
            f"words {caption_block['word_mean']:.1f} (sd {caption_block['word_sd']:.1f})"
        )
        print(
            f"  hedged: {100.0 * caption_block['hedge_rate']:.1f}%, "
            f"capped: {caption_block['capped_count']}"
        )
    elif len(captions) < 2:
        print("captions: fewer than 2; statistics unavailable")
    return EXIT_OK


def _cmd_search(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    hits = snapshot.fulltext.search(args.query, limit=args.limit)
    if args.json:
        _print_json(
            [
                {
                    "image_id": h.image_id,
                    "score": h.score,
                    "matched_terms": list(h.matched_terms),
                }
                for h in hits
            ]
        )
        return EXIT_OK
    if not hits:
        print("no matches")
        return EXIT_OK
    for hit in hits:
        caption = snapshot.caption_for(hit.image_id)
        text = caption.text if caption else ""
        if len(text) > 100:
            text = text[:100].rstrip() + "…"
        print(f"{hit.score:8.3f}  {hit.image_id}  {text}")
    return EXIT_OK


def _cmd_export(args, config: AppConfig) -> int:
    ws = Workspace(config.workspace_root)
    if args.what == "projection":
        payload = ws.read_projection().to_dict()
        text = json.dumps(payload, ensure_ascii=False, indent=2)
        _write_output(args.out, text + "\n")
        return EXIT_OK
    if args.what == "clusters":
        assignment = ws.read_clusters()
        if args.json:
            text = json.dumps(assignment.to_dict(), ensure_ascii=False, indent=2) + "\n"
        else:
            text = _cluster_table(assignment) + "\n"
        _write_output(args.out, text)
        return EXIT_OK
    # embeddings: binary copy of one space
    if not args.out:
        raise UsageError("export --what embeddings requires --out FILE")
    space = ws.read_space(args.space)
    written = write_embedding_file(space, args.out)
    print(f"wrote {written} bytes ({len(space)} vectors) to {args.out}", file=sys.stderr)
    return EXIT_OK


def _write_output(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_serve(args, config: AppConfig) -> int:
    from captionlens.service.app import serve
    from captionlens.service.state import ServiceState

    ws = Workspace(config.workspace_root)
    snapshot = ws.load_snapshot()
    state = ServiceState(
        snapshot,
        image_root=config.image_root,
        thumbnail_dir=ws.thumbnail_dir,
        cors_origins=config.cors_origins,
    )
    host = args.host or config.serve_host
    port = args.port or config.serve_port
    serve(state, host=host, port=port)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="captionlens", description=__doc__)
    parser.add_argument("--config", default=None, help="path to a key=value config file")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name: str, func, help_text: str, json_flag: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if json_flag:
            p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    add("ingest", _cmd_ingest, "scan the image root into the manifest")
    add("caption", _cmd_caption, "caption pending images")
    p = add("embed", _cmd_embed, "embed captions into the caption space")
    p.add_argument("--neutralize", action="store_true", help="neutralize gendered terms first")

    p = add("import-vectors", _cmd_import_vectors, "load an external embedding space")
    p.add_argument("--space", required=True, help="space name, e.g. visual")
    p.add_argument("--file", required=True, help="embedding file to import")

    p = add("recommend", _cmd_recommend, "nearest neighbors of an image")
    p.add_argument("image_id")
    p.add_argument("--n", type=_positive_int, default=5)
    p.add_argument("--space", default=CAPTION_SPACE)

    p = add("evaluate", _cmd_evaluate, "similarity structure metrics")
    ev = p.add_subparsers(dest="metric", metavar="METRIC")
    p_sym = ev.add_parser("symmetry", help="reciprocated neighbor links per n")
    p_sym.set_defaults(func=_cmd_evaluate, metric="symmetry")
    p_sym.add_argument("--space", default=CAPTION_SPACE)
    p_sym.add_argument("--n", type=_n_list, default=[1, 5, 10, 15, 20, 25])
    p_sym.add_argument("--json", action="store_true")
    p_ov = ev.add_parser("overlap", help="shared neighbors between two spaces per n")
    p_ov.set_defaults(func=_cmd_evaluate, metric="overlap")
    p_ov.add_argument("--spaces", default="caption,visual")
    p_ov.add_argument("--n", type=_n_list, default=[1, 5, 10, 15, 20, 25])
    p_ov.add_argument("--json", action="store_true")

    p = add("cluster", _cmd_cluster, "build the dendrogram, cut, order, and project")
    p.add_argument("--k", type=_positive_int, default=32)
    p.add_argument("--mode", choices=["auto", "matrix", "centroid"], default="auto")

    add("label", _cmd_label, "attach distinguishing terms to each cluster")
    add("stats", _cmd_stats, "corpus overview and caption statistics")

    p = add("search", _cmd_search, "full-text search over captions")
    p.add_argument("query")
    p.add_argument("--limit", type=_positive_int, default=10)

    p = add("export", _cmd_export, "write artifacts for external tools")
    p.add_argument("--what", required=True, choices=["projection", "clusters", "embeddings"])
    p.add_argument("--space", default=CAPTION_SPACE, help="space to export (embeddings)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = add("serve", _cmd_serve, "run the HTTP API", json_flag=False)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=_positive_int, default=None)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if args.command == "evaluate" and getattr(args, "metric", None) is None:
            raise UsageError("evaluate: choose a metric: symmetry or overlap")
        config = load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
