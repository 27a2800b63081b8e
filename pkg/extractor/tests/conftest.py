import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    """A miniature wav2vec2 checkpoint with the production hidden width.

    Random weights, one encoder layer, standard convolutional geometry
    (320-sample hop). Built locally so the suite never touches the network.
    """
    import torch
    from transformers import Wav2Vec2Config, Wav2Vec2FeatureExtractor, Wav2Vec2Model

    config = Wav2Vec2Config(
        hidden_size=1024,
        num_hidden_layers=1,
        num_attention_heads=16,
        intermediate_size=256,
        vocab_size=40,
    )
    torch.manual_seed(0)
    model = Wav2Vec2Model(config)
    path = tmp_path_factory.mktemp("checkpoint")
    model.save_pretrained(path)
    Wav2Vec2FeatureExtractor().save_pretrained(path)
    return str(path)
