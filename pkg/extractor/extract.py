#!/usr/bin/env python3
"""Dump wav2vec2 frame embeddings for a directory of WAV files.

Runs a pretrained wav2vec2 checkpoint over 16 kHz mono PCM audio and writes,
per utterance, a T x D float32 NPY matrix of final transformer-encoder hidden
states (the tensor feeding the CTC head) plus a manifest.json describing the
lot. The output directory is directly consumable by the phonalign package,
which only ever sees these files, never this process.

Frame count rule: the convolutional front end maps n samples through each
(kernel, stride) layer as t -> (t - kernel) // stride + 1, zero when t is
shorter than the kernel. For the standard geometry (strides 5,2,2,2,2,2,2 =
320x total) that gives 49 frames for exactly 1 s of 16 kHz audio and 0 frames
for anything under 400 samples. Audio that maps to 0 frames is written as a
(0, D) matrix without running the model.

Inference is CPU, eval mode, no grad: identical input files produce identical
matrices on the same hardware.
"""

import argparse
import json
import sys
import wave
from math import gcd
from pathlib import Path

import numpy as np

DEFAULT_CHECKPOINT = "facebook/wav2vec2-xlsr-53-espeak-cv-ft"
TARGET_RATE = 16000
FRAME_STRIDE = 0.02  # seconds per output frame at 16 kHz (320-sample hop)


def read_wav(path):
    """Decode one WAV file to float32 samples in [-1, 1] plus its rate.

    Only mono 16-bit PCM is accepted; anything else is a hard error rather
    than a silent downmix.
    """
    try:
        with wave.open(str(path), "rb") as f:
            channels = f.getnchannels()
            width = f.getsampwidth()
            rate = f.getframerate()
            raw = f.readframes(f.getnframes())
    except (wave.Error, EOFError) as exc:
        raise RuntimeError(f"{path}: cannot decode WAV: {exc}") from exc
    if channels != 1:
        raise RuntimeError(f"{path}: expected mono audio, got {channels} channels")
    if width != 2:
        raise RuntimeError(f"{path}: expected 16-bit PCM, got {8 * width}-bit")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    return samples, rate


def resample_to_target(samples, rate):
    """Polyphase resample to TARGET_RATE."""
    from scipy.signal import resample_poly

    if samples.size == 0:
        return samples
    g = gcd(TARGET_RATE, rate)
    out = resample_poly(samples.astype(np.float64), TARGET_RATE // g, rate // g)
    return out.astype(np.float32)


def conv_frame_count(n_samples, kernels, strides):
    t = int(n_samples)
    for k, s in zip(kernels, strides):
        if t < k:
            return 0
        t = (t - k) // s + 1
    return t


def load_checkpoint(checkpoint):
    """Load the encoder and its companion feature extractor.

    `checkpoint` is a hub identifier or a local directory. A checkpoint
    without a saved preprocessor config falls back to the stock wav2vec2
    feature-extractor defaults (16 kHz, per-utterance normalization).
    """
    import transformers

    transformers.logging.set_verbosity_error()
    try:
        model = transformers.AutoModel.from_pretrained(checkpoint)
    except Exception as exc:
        raise RuntimeError(f"cannot load checkpoint {checkpoint!r}: {exc}") from exc
    try:
        fe = transformers.AutoFeatureExtractor.from_pretrained(checkpoint)
    except Exception:
        fe = transformers.Wav2Vec2FeatureExtractor()
    model.eval()
    return model, fe


def extract_embeddings(model, fe, samples):
    """Final-encoder hidden states for one utterance, (T, D) float32."""
    import torch

    kernels = model.config.conv_kernel
    strides = model.config.conv_stride
    dim = model.config.hidden_size
    expected = conv_frame_count(samples.size, kernels, strides)
    if expected == 0:
        return np.zeros((0, dim), dtype=np.float32)
    inputs = fe(samples, sampling_rate=TARGET_RATE, return_tensors="pt")
    with torch.no_grad():
        hidden = model(inputs.input_values).last_hidden_state
    out = hidden[0].numpy().astype(np.float32)
    if out.shape != (expected, dim):
        raise RuntimeError(
            f"checkpoint geometry surprise: expected {(expected, dim)}, "
            f"model produced {out.shape}"
        )
    return out


def write_matrix(matrix, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        np.lib.format.write_array(f, np.ascontiguousarray(matrix), version=(1, 0))


def list_wavs(wav_dir):
    wav_dir = Path(wav_dir)
    if not wav_dir.is_dir():
        raise RuntimeError(f"not a directory: {wav_dir}")
    paths = sorted(p for p in wav_dir.iterdir() if p.suffix.lower() == ".wav")
    if not paths:
        raise RuntimeError(f"no .wav files in {wav_dir}")
    seen = {}
    for p in paths:
        if p.stem in seen:
            raise RuntimeError(f"duplicate utterance id {p.stem!r}: {seen[p.stem]} and {p}")
        seen[p.stem] = p
    return paths


def run(wav_dir, out_dir, checkpoint=DEFAULT_CHECKPOINT, resample=False):
    wavs = list_wavs(wav_dir)
    model, fe = load_checkpoint(checkpoint)
    out_dir = Path(out_dir)
    entries = []
    for wav in wavs:
        samples, rate = read_wav(wav)
        if rate != TARGET_RATE:
            if not resample:
                raise RuntimeError(
                    f"{wav}: sample rate {rate} Hz; pass --resample to convert "
                    f"to {TARGET_RATE} Hz"
                )
            samples = resample_to_target(samples, rate)
        matrix = extract_embeddings(model, fe, samples)
        rel = f"embeddings/{wav.stem}.npy"
        write_matrix(matrix, out_dir / rel)
        entries.append({
            "utterance_id": wav.stem,
            "embedding_path": rel,
            "frames": matrix.shape[0],
            "dim": matrix.shape[1],
            "stride": FRAME_STRIDE,
            "offset": 0.0,
            "audio_path": str(wav),
        })
        print(f"{wav.stem}: {matrix.shape[0]} x {matrix.shape[1]}")
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps({"version": 1, "entries": entries}, indent=2) + "\n"
    )
    print(f"wrote {len(entries)} entries to {manifest_path}")
    return manifest_path


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="dump wav2vec2 frame embeddings plus a manifest"
    )
    parser.add_argument("--wav-dir", required=True, help="directory of 16 kHz mono WAVs")
    parser.add_argument("--out-dir", required=True, help="output directory")
    parser.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT,
                        help="hub id or local checkpoint directory")
    parser.add_argument("--resample", action="store_true",
                        help="convert non-16 kHz input instead of rejecting it")
    args = parser.parse_args(argv)
    try:
        run(args.wav_dir, args.out_dir, checkpoint=args.checkpoint,
            resample=args.resample)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
