"""Command-line front end for the full pipeline.

Subcommands: prepare, encrypt, embed, extract, recover, both, evaluate,
bench. Keys are 64-hex-char strings given by flag or environment
(MESHRDH_KM / MESHRDH_KA); the nonce is auto-generated and recorded in
the container unless pinned with --nonce.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import cipher, payload
from .exceptions import MeshRdhError
from .locmap import decode_labels
from .mesh_io import (
    Mesh,
    guess_format,
    parse_mesh,
    read_container,
    write_container,
    write_mesh,
)
from .metrics import CSV_HEADER, evaluate
from .quantizer import dequantize, quantize
from .topology import STRATEGIES


def _load_mesh(path):
    data = Path(path).read_bytes()
    return parse_mesh(data, guess_format(path))


def _save_mesh(mesh, path):
    Path(path).write_bytes(write_mesh(mesh, guess_format(path)))


def _key(value, envvar, what):
    value = value or os.environ.get(envvar)
    if not value:
        raise click.ClickException(
            f"{what} key required (flag or {envvar} environment variable)"
        )
    return cipher.parse_key(value)


def _nonce(value):
    if value:
        return cipher.parse_key(value, cipher.NONCE_BYTES)
    return os.urandom(cipher.NONCE_BYTES)


def normalize_mesh(mesh):
    """Scale a mesh into (-1, 1); returns (scaled mesh, scale factor).

    Undo by multiplying the recovered coordinates by the factor, which
    travels in the container header.
    """
    maxabs = float(np.abs(mesh.vertices).max())
    if maxabs == 0.0:
        return mesh, 1.0
    scale = maxabs * (1.0 + 1e-6)
    return Mesh(mesh.vertices / scale, mesh.faces.copy()), scale


def _pipeline_options(f):
    f = click.option("--p", "precision", type=int, default=5, show_default=True,
                     help="Precision exponent (digits kept after the point).")(f)
    f = click.option("--strategy", type=click.Choice(STRATEGIES), default="topology",
                     show_default=True)(f)
    f = click.option("--nonce", default=None, help="24 hex chars; random if omitted.")(f)
    f = click.option("--normalize", is_flag=True,
                     help="Scale coordinates into (-1, 1) first; the factor is "
                          "recorded in the container for undo.")(f)
    return f


def _build(mesh, precision, strategy, nonce_hex, normalize, key_m):
    scale = 1.0
    if normalize:
        mesh, scale = normalize_mesh(mesh)
    q = quantize(mesh, precision)
    return payload.build_container(
        q, key_m, _nonce(nonce_hex), strategy=strategy, scale=scale
    )


def _capacity_line(container):
    labels = decode_labels(
        container.aux.compressed_map, container.aux.s_e_count, container.l
    )
    info = payload.capacity_from_parts(labels, container.aux, container.l)
    er = info.embedding_rate(container.n)
    return info, (
        f"l_p={info.total_bits} bits, l_ai={info.aux_bits} bits, "
        f"net={info.net_bits} bits ({info.max_payload_bytes} bytes), ER={er:.2f} bpv"
    )


@click.group()
def main():
    """Reversible data hiding for encrypted 3D triangular meshes."""


@main.command()
@click.argument("mesh_path", type=click.Path(exists=True))
@_pipeline_options
@click.option("--out", type=click.Path(), default=None,
              help="Write the (optionally normalized) mesh here.")
def prepare(mesh_path, precision, strategy, nonce, normalize, out):
    """Report capacity for a mesh without writing a container."""
    try:
        mesh = _load_mesh(mesh_path)
        scale = 1.0
        if normalize:
            mesh, scale = normalize_mesh(mesh)
        q = quantize(mesh, precision)
        partition = payload._derive_partition(q.faces, q.n, strategy)
        from .predictor import build_label_map

        label_map = build_label_map(q, partition)
        info = payload.capacity(label_map)
        s_e = len(partition.embed_set)
        click.echo(f"n={q.n} m={q.faces.shape[0]} p={precision} l={q.l} "
                   f"strategy={strategy} scale={scale:g}")
        click.echo(f"|S_e|={s_e} utilization={100.0 * s_e / q.n:.1f}%")
        click.echo(
            f"l_p={info.total_bits} bits, l_ai={info.aux_bits} bits, "
            f"net={info.net_bits} bits ({info.max_payload_bytes} bytes), "
            f"ER={info.embedding_rate(q.n):.2f} bpv"
        )
        if out:
            _save_mesh(mesh, out)
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("mesh_path", type=click.Path(exists=True))
@_pipeline_options
@click.option("--km", default=None, help="Model key, 64 hex chars.")
@click.option("--out", type=click.Path(), required=True)
def encrypt(mesh_path, precision, strategy, nonce, normalize, km, out):
    """Quantize, label, and encrypt a mesh into a container (no payload)."""
    try:
        key_m = _key(km, "MESHRDH_KM", "model")
        container = _build(_load_mesh(mesh_path), precision, strategy, nonce,
                           normalize, key_m)
        Path(out).write_bytes(write_container(container))
        _, line = _capacity_line(container)
        click.echo(line)
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("mesh_path", type=click.Path(exists=True))
@click.argument("payload_path", type=click.Path(exists=True))
@_pipeline_options
@click.option("--km", default=None, help="Model key, 64 hex chars.")
@click.option("--ka", default=None, help="Data key, 64 hex chars.")
@click.option("--out", type=click.Path(), required=True)
def embed(mesh_path, payload_path, precision, strategy, nonce, normalize,
          km, ka, out):
    """Full sender + data-hider path: encrypt the mesh and embed a payload."""
    try:
        key_m = _key(km, "MESHRDH_KM", "model")
        key_a = _key(ka, "MESHRDH_KA", "data")
        container = _build(_load_mesh(mesh_path), precision, strategy, nonce,
                           normalize, key_m)
        data = Path(payload_path).read_bytes()
        enc_data = cipher.encrypt_payload(data, key_a, container.nonce)
        stego = payload.embed(container, enc_data)
        Path(out).write_bytes(write_container(stego))
        _, line = _capacity_line(stego)
        click.echo(line)
        click.echo(f"embedded {len(data)} bytes")
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("container_path", type=click.Path(exists=True))
@click.option("--ka", default=None, help="Data key, 64 hex chars.")
@click.option("--out", type=click.Path(), required=True)
def extract(container_path, ka, out):
    """Case 1: recover the payload with the data key only."""
    try:
        key_a = _key(ka, "MESHRDH_KA", "data")
        container = read_container(Path(container_path).read_bytes())
        data = payload.extract(container, key_a)
        Path(out).write_bytes(data)
        click.echo(f"extracted {len(data)} bytes")
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


def _recover_mesh(container, key_m):
    q = payload.recover(container, key_m)
    mesh = dequantize(q)
    if container.scale != 1.0:
        mesh = Mesh(mesh.vertices * container.scale, mesh.faces.copy())
    return mesh


@main.command()
@click.argument("container_path", type=click.Path(exists=True))
@click.option("--km", default=None, help="Model key, 64 hex chars.")
@click.option("--out", type=click.Path(), required=True,
              help="Output mesh path (.off or .obj).")
def recover(container_path, km, out):
    """Case 2: restore the mesh with the model key only."""
    try:
        key_m = _key(km, "MESHRDH_KM", "model")
        container = read_container(Path(container_path).read_bytes())
        _save_mesh(_recover_mesh(container, key_m), out)
        click.echo(f"recovered mesh written to {out}")
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("container_path", type=click.Path(exists=True))
@click.option("--km", default=None, help="Model key, 64 hex chars.")
@click.option("--ka", default=None, help="Data key, 64 hex chars.")
@click.option("--out-data", type=click.Path(), required=True)
@click.option("--out-mesh", type=click.Path(), required=True)
def both(container_path, km, ka, out_data, out_mesh):
    """Case 3: extract the payload and restore the mesh."""
    try:
        key_m = _key(km, "MESHRDH_KM", "model")
        key_a = _key(ka, "MESHRDH_KA", "data")
        container = read_container(Path(container_path).read_bytes())
        data, q = payload.extract_and_recover(container, key_a, key_m)
        Path(out_data).write_bytes(data)
        mesh = dequantize(q)
        if container.scale != 1.0:
            mesh = Mesh(mesh.vertices * container.scale, mesh.faces.copy())
        _save_mesh(mesh, out_mesh)
        click.echo(f"extracted {len(data)} bytes; mesh written to {out_mesh}")
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("original_path", type=click.Path(exists=True))
@click.argument("container_path", type=click.Path(exists=True))
@click.argument("recovered_path", type=click.Path(exists=True))
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Append the report row to this CSV (header added if new).")
def evaluate_cmd(original_path, container_path, recovered_path, csv_path):
    """Compute SNR, Hausdorff distance, and capacity for one run."""
    try:
        original = _load_mesh(original_path)
        container = read_container(Path(container_path).read_bytes())
        recovered = _load_mesh(recovered_path)
        rep = evaluate(original, container, recovered,
                       name=Path(original_path).stem)
        click.echo(CSV_HEADER)
        click.echo(rep.csv_row())
        if csv_path:
            _append_csv(csv_path, [rep])
    except MeshRdhError as exc:
        raise click.ClickException(str(exc)) from exc


main.add_command(evaluate_cmd, name="evaluate")


def _append_csv(path, reports):
    path = Path(path)
    new = not path.exists()
    with path.open("a") as fh:
        if new:
            fh.write(CSV_HEADER + "\n")
        for rep in reports:
            fh.write(rep.csv_row() + "\n")


@main.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--p", "precision", type=int, default=5, show_default=True)
@click.option("--km", default=None)
@click.option("--ka", default=None)
@click.option("--nonce", default=None,
              help="Pin one nonce for reproducible output (reused per mesh).")
@click.option("--normalize", is_flag=True)
@click.option("--csv", "csv_path", type=click.Path(), default="bench.csv",
              show_default=True)
@click.option("--fig-dir", type=click.Path(), default=None,
              help="Directory for rendered figures (defaults beside the CSV).")
def bench(corpus_dir, precision, km, ka, nonce, normalize, csv_path, fig_dir):
    """Run the full pipeline over a mesh corpus, both strategies, and
    write a CSV plus capacity/utilization figures."""
    key_m = cipher.parse_key(km) if km else os.urandom(cipher.KEY_BYTES)
    key_a = cipher.parse_key(ka) if ka else os.urandom(cipher.KEY_BYTES)
    meshes = sorted(
        p for p in Path(corpus_dir).iterdir()
        if p.suffix.lower() in (".off", ".obj")
    )
    reports = []
    for mesh_path in meshes:
        for strategy in STRATEGIES:
            try:
                mesh = _load_mesh(mesh_path)
                container = _build(mesh, precision, strategy, nonce, normalize,
                                   key_m)
                info, _ = _capacity_line(container)
                data = os.urandom(info.max_payload_bytes)
                enc_data = cipher.encrypt_payload(data, key_a, container.nonce)
                stego = payload.embed(container, enc_data)
                got = payload.extract(stego, key_a)
                if got != data:
                    raise MeshRdhError("extracted payload mismatch")
                recovered = _recover_mesh(stego, key_m)
                reports.append(evaluate(mesh, stego, recovered, name=mesh_path.stem))
            except MeshRdhError as exc:
                click.echo(f"SKIP {mesh_path.name} [{strategy}]: {exc}", err=True)
    path = Path(csv_path)
    with path.open("w") as fh:
        fh.write(CSV_HEADER + "\n")
        for rep in reports:
            fh.write(rep.csv_row() + "\n")
        for strategy in STRATEGIES:
            ers = [r.er_bpv for r in reports if r.strategy == strategy]
            if ers:
                fh.write(
                    f"MEAN({strategy}),,,,,,,,,{sum(ers) / len(ers):.6g},,\n"
                )
    click.echo(f"{len(reports)} rows written to {path}")
    if reports:
        from .report import render_bench_figures

        out_dir = Path(fig_dir) if fig_dir else path.parent
        for fig in render_bench_figures(reports, out_dir):
            click.echo(f"figure written to {fig}")


if __name__ == "__main__":
    main()
