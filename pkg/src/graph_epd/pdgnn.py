"""
PDGNN, a message-passing network predicting one (birth, death) pair per edge.

Layer k maps features of width d_in to width d (input 1, hidden 32):

    alpha_uv = softmax over v in N(u) of leaky_relu(a . [h_u W_a , h_v W_a], 0.2)
    msg(v->u) = prelu(alpha_uv * W([h_u , h_v]))
    h_u      = prelu(U([sum_v msg , min_v msg , h_u]))

with one PReLU slope per layer shared by the message and the update. The
head is Linear(2d, 32) -> PReLU -> Linear(32, 2) on [h_u , h_v], endpoints
smaller id first (``head_mode='ordered'``) or averaged over both orders
(``'symmetric'``). Vertices without neighbors aggregate zero vectors.

Flat parameter order (the order of ``model.parameters()``): for each layer
W.weight, W.bias, W_a.weight, a, act.weight, U.weight, U.bias; then
head.0.weight, head.0.bias, head.1.weight, head.2.weight, head.2.bias.
W_a and a are absent when ``edge_weight='none'``.

Variants
--------
pdgnn        edge messages, attention, sum and min aggregation
gat          node messages W(h_v), attention, sum aggregation
gat_min      node messages, attention, sum and min aggregation
pdgnn_no_ew  edge messages without attention, sum and min aggregation

Training uses torch float64 autograd, AdamW (decoupled weight decay) and a
forced matching between predicted and exact points, recomputed at every
forward pass and held fixed for the gradient.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import numpy as np
import pandas as pd
import torch
import torch.nn as nn
import torch.nn.functional as F
from scipy import optimize
from sklearn.model_selection import train_test_split

from .diagrams import default_image_params, persistence_image, pie, wasserstein2
from .engines import compute_epd
from .errors import DataFormatError, UsageError
from .filtration import FilteredGraph
from .io import MAGIC, VERSION, RunConfig, format_value
from .persistence import PersistenceDiagram, PersistencePair, Simplex

log = logging.getLogger(__name__)

DTYPE = torch.float64
LOSS_MODES = ("forced", "per-edge")
HEAD_MODES = ("ordered", "symmetric")
MODEL_FORMATS = ("text", "binary")
VARIANTS = {
    "pdgnn": dict(message="edge", edge_weight="attention", aggregation="sum_min"),
    "gat": dict(message="node", edge_weight="attention", aggregation="sum"),
    "gat_min": dict(message="node", edge_weight="attention", aggregation="sum_min"),
    "pdgnn_no_ew": dict(message="edge", edge_weight="none", aggregation="sum_min"),
}


@dataclass(frozen=True)
class ModelConfig:
    variant: str = "pdgnn"
    hidden: int = 32
    layers: int = 4
    head_hidden: int = 32
    message: str = "edge"
    edge_weight: str = "attention"
    aggregation: str = "sum_min"
    head_mode: str = "ordered"

    @classmethod
    def from_variant(cls, variant="pdgnn", **overrides):
        if variant not in VARIANTS:
            raise UsageError(f"unknown model variant '{variant}' (expected one of: {', '.join(VARIANTS)})")
        return cls(variant=variant, **{**VARIANTS[variant], **overrides})

    def __post_init__(self):
        if self.head_mode not in HEAD_MODES:
            raise UsageError(f"unknown head mode '{self.head_mode}'")
        if self.message not in ("edge", "node") or self.edge_weight not in ("attention", "none") \
                or self.aggregation not in ("sum_min", "sum"):
            raise UsageError(f"invalid architecture flags {self}")
        if self.hidden < 1 or self.layers < 1 or self.head_hidden < 1:
            raise UsageError("layer sizes must be positive")

    def dims(self):
        return [1] + [self.hidden] * self.layers


@dataclass
class TrainConfig:
    learning_rate: float = 0.002
    weight_decay: float = 0.01
    batch_size: int = 10
    epochs: int = 20
    dropout: float = 0.0
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    seed: int = 0
    loss_mode: str = "forced"
    train_fraction: float = 1.0
    test_size: float = 0.2
    resolution: int = 5

    def __post_init__(self):
        if self.learning_rate < 0 or self.weight_decay < 0:
            raise UsageError("learning rate and weight decay must be nonnegative")
        if self.batch_size < 1 or self.epochs < 0:
            raise UsageError("batch size must be positive and epochs nonnegative")
        if self.loss_mode not in LOSS_MODES:
            raise UsageError(f"unknown loss mode '{self.loss_mode}' (expected one of: {', '.join(LOSS_MODES)})")
        if not 0 < self.train_fraction <= 1:
            raise UsageError(f"train fraction must lie in (0, 1], got {self.train_fraction}")
        if not 0 <= self.dropout < 1:
            raise UsageError(f"dropout must lie in [0, 1), got {self.dropout}")


#########
# MODEL #
#########

@dataclass
class GraphTensors:
    x: torch.Tensor        # (n, 1) filter values
    neighbors: torch.Tensor  # (n, D) neighbor ids, padded with 0
    mask: torch.Tensor     # (n, D) True on real neighbors
    edges: torch.Tensor    # (m, 2) endpoints, u < v


def graph_tensors(fg: FilteredGraph) -> GraphTensors:
    g = fg.graph
    width = max([1] + [len(nbrs) for nbrs in g.adjacency])
    neighbors = np.zeros((g.num_vertices, width), dtype=np.int64)
    mask = np.zeros((g.num_vertices, width), dtype=bool)
    for u, nbrs in enumerate(g.adjacency):
        neighbors[u, :len(nbrs)] = nbrs
        mask[u, :len(nbrs)] = True
    return GraphTensors(
        x=torch.tensor(fg.vertex_values, dtype=DTYPE).reshape(-1, 1),
        neighbors=torch.from_numpy(neighbors),
        mask=torch.from_numpy(mask),
        edges=torch.from_numpy(np.ascontiguousarray(g.edges, dtype=np.int64)),
    )


class MessageLayer(nn.Module):

    def __init__(self, d_in, d, config: ModelConfig):
        super().__init__()
        self.edge_message = config.message == "edge"
        self.attention = config.edge_weight == "attention"
        self.with_min = config.aggregation == "sum_min"
        self.W = nn.Linear(2 * d_in if self.edge_message else d_in, d)
        if self.attention:
            self.W_a = nn.Linear(d_in, d, bias=False)
            self.a = nn.Parameter(torch.zeros(2 * d))
        self.act = nn.PReLU(1, init=0.25)
        self.U = nn.Linear((2 if self.with_min else 1) * d + d_in, d)

    def forward(self, h, neighbors, mask):
        width = neighbors.shape[1]
        has_any = mask.any(dim=1, keepdim=True)
        h_nbr = h[neighbors]
        if self.edge_message:
            msg = self.W(torch.cat([h.unsqueeze(1).expand(-1, width, -1), h_nbr], dim=-1))
        else:
            msg = self.W(h_nbr)
        if self.attention:
            z = self.W_a(h)
            pair = torch.cat([z.unsqueeze(1).expand(-1, width, -1), z[neighbors]], dim=-1)
            logits = F.leaky_relu(pair @ self.a, 0.2).masked_fill(~mask, float("-inf"))
            logits = torch.where(has_any, logits, torch.zeros_like(logits))
            alpha = torch.softmax(logits, dim=1) * mask
            msg = msg * alpha.unsqueeze(-1)
        msg = self.act(msg)
        valid = mask.unsqueeze(-1)
        parts = [(msg * valid).sum(dim=1)]
        if self.with_min:
            m_min = msg.masked_fill(~valid, float("inf")).min(dim=1).values
            parts.append(torch.where(has_any, m_min, torch.zeros_like(m_min)))
        return self.act(self.U(torch.cat(parts + [h], dim=-1)))


class PDGNN(nn.Module):

    def __init__(self, config: Optional[ModelConfig] = None):
        super().__init__()
        self.config = config or ModelConfig()
        dims = self.config.dims()
        self.layers = nn.ModuleList(MessageLayer(d_in, d, self.config) for d_in, d in zip(dims[:-1], dims[1:]))
        self.head = nn.Sequential(nn.Linear(2 * dims[-1], self.config.head_hidden),
                                  nn.PReLU(1, init=0.25),
                                  nn.Linear(self.config.head_hidden, 2))
        self.double()

    def forward(self, graph: GraphTensors, dropout=0.0):
        h = graph.x
        for layer in self.layers:
            h = layer(h, graph.neighbors, graph.mask)
            if dropout:
                h = F.dropout(h, dropout, self.training)
        hu, hv = h[graph.edges[:, 0]], h[graph.edges[:, 1]]
        out = self.head(torch.cat([hu, hv], dim=-1))
        if self.config.head_mode == "symmetric":
            out = (out + self.head(torch.cat([hv, hu], dim=-1))) / 2
        return out


def parameter_count(config: ModelConfig):
    """Closed-form length of the flat parameter vector."""
    total = 0
    dims = config.dims()
    for d_in, d in zip(dims[:-1], dims[1:]):
        msg_in = 2 * d_in if config.message == "edge" else d_in
        total += msg_in * d + d
        if config.edge_weight == "attention":
            total += d_in * d + 2 * d
        total += 1
        total += ((2 if config.aggregation == "sum_min" else 1) * d + d_in) * d + d
    total += 2 * dims[-1] * config.head_hidden + config.head_hidden + 1 + config.head_hidden * 2 + 2
    return total


def _uniform_(tensor, bound, generator):
    with torch.no_grad():
        tensor.copy_((torch.rand(tensor.shape, generator=generator, dtype=DTYPE) * 2 - 1) * bound)


def init_params(seed=0, config: Optional[ModelConfig] = None) -> PDGNN:
    """Uniform fan-in initialization from a seeded generator; PReLU slopes 0.25."""
    model = PDGNN(config)
    generator = torch.Generator().manual_seed(int(seed))
    for module in model.modules():
        if isinstance(module, nn.Linear):
            bound = 1.0 / math.sqrt(module.in_features)
            _uniform_(module.weight, bound, generator)
            if module.bias is not None:
                _uniform_(module.bias, bound, generator)
        elif isinstance(module, nn.PReLU):
            with torch.no_grad():
                module.weight.fill_(0.25)
        elif isinstance(module, MessageLayer) and module.attention:
            _uniform_(module.a, 1.0 / math.sqrt(module.a.numel()), generator)
    return model


def flat_parameters(model):
    return nn.utils.parameters_to_vector(model.parameters()).detach().clone()


def set_flat_parameters(model, vector):
    vector = torch.as_tensor(vector, dtype=DTYPE)
    if vector.numel() != sum(p.numel() for p in model.parameters()):
        raise DataFormatError(f"parameter vector has {vector.numel()} values, model needs "
                              f"{sum(p.numel() for p in model.parameters())}")
    with torch.no_grad():
        nn.utils.vector_to_parameters(vector, model.parameters())


def forward(model: PDGNN, fg, dropout=0.0):
    """Per-edge predicted (birth, death), shape (m, 2), attached to the autograd graph."""
    graph = fg if isinstance(fg, GraphTensors) else graph_tensors(fg)
    return model(graph, dropout)


########
# LOSS #
########

def forced_matching_torch(pred, target):
    """Sum of squared distances under the optimal bijection, matching held fixed."""
    if pred.shape[0] == 0:
        return pred.sum() * 0
    with torch.no_grad():
        cost = torch.cdist(pred, target) ** 2
    rows, cols = optimize.linear_sum_assignment(cost.numpy())
    return ((pred[torch.from_numpy(rows)] - target[torch.from_numpy(cols)]) ** 2).sum()


def graph_loss(pred, target, loss_mode="forced"):
    if loss_mode == "per-edge":
        return ((pred - target) ** 2).sum()
    return forced_matching_torch(pred, target)


@dataclass
class TrainingSample:
    name: str
    fg: FilteredGraph
    targets: np.ndarray
    diagram: PersistenceDiagram
    tensors: GraphTensors = field(repr=False, default=None)

    def __post_init__(self):
        if self.tensors is None:
            self.tensors = graph_tensors(self.fg)


def make_sample(name, fg, engine="unionfind"):
    """Exact targets (one pair per edge) for a filtered graph."""
    diagram, pairing = compute_epd(fg, engine)
    return TrainingSample(name, fg, pairing.targets(), diagram)


def batch_loss(model, batch, loss_mode="forced", dropout=0.0):
    losses = []
    for sample in batch:
        pred = model(sample.tensors, dropout)
        target = torch.as_tensor(sample.targets, dtype=DTYPE).reshape(-1, 2)
        if target.shape[0] != pred.shape[0]:
            raise DataFormatError(f"{sample.name}: {target.shape[0]} targets for {pred.shape[0]} edges")
        losses.append(graph_loss(pred, target, loss_mode))
    return torch.stack(losses).mean()


def loss_and_grad(model, batch, loss_mode="forced", dropout=0.0):
    """
    Mean per-graph loss over the batch and its gradient, one tensor per
    parameter in ``model.parameters()`` order. Weight decay is left to the
    optimizer step.
    """
    params = list(model.parameters())
    loss = batch_loss(model, batch, loss_mode, dropout)
    if not loss.requires_grad:
        return float(loss), tuple(torch.zeros_like(p) for p in params)
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    grads = tuple(torch.zeros_like(p) if g is None else g for p, g in zip(params, grads))
    return float(loss.detach()), grads


def loss_of_flat(model, batch, loss_mode="forced"):
    """Loss as a function of the flat parameter vector (for gradient checks)."""
    names = [name for name, _ in model.named_parameters()]
    shapes = [p.shape for p in model.parameters()]
    sizes = [p.numel() for p in model.parameters()]

    def loss(vector):
        chunks = torch.split(vector, sizes)
        params = {n: c.reshape(s) for n, c, s in zip(names, chunks, shapes)}
        total = []
        for sample in batch:
            pred = torch.func.functional_call(model, params, (sample.tensors,))
            total.append(graph_loss(pred, torch.as_tensor(sample.targets, dtype=DTYPE), loss_mode))
        return torch.stack(total).mean()
    return loss


#############
# OPTIMIZER #
#############

class AdamState:
    """First and second moments and step counter, held by torch.optim.AdamW."""

    def __init__(self, model, cfg: TrainConfig):
        self.optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate, betas=tuple(cfg.betas),
                                           eps=cfg.eps, weight_decay=cfg.weight_decay, foreach=False)

    @property
    def step(self):
        steps = [s["step"] for s in self.optimizer.state.values() if "step" in s]
        return int(steps[0]) if steps else 0


def adam_step(model, grads, state: AdamState):
    """One bias-corrected AdamW update with decoupled weight decay."""
    for p, g in zip(model.parameters(), grads):
        p.grad = g.detach().clone()
    state.optimizer.step()
    state.optimizer.zero_grad(set_to_none=True)
    return model, state


############
# TRAINING #
############

def predict_diagram(model, fg, epsilon=0.0):
    """
    Diagram of the |E| predicted points; points with |death - birth| < epsilon
    are dropped. Points with death < birth are extended 1D points, the others 0D.
    """
    with torch.no_grad():
        pred = forward(model, fg).numpy()
    dim0, dim1 = [], []
    for e, (b, d) in enumerate(pred):
        if abs(d - b) < epsilon:
            continue
        pair = PersistencePair(float(b), float(d), 1 if d < b else 0, Simplex(1, e), Simplex(1, e))
        (dim1 if d < b else dim0).append(pair)
    return PersistenceDiagram(dim0, dim1, include_zero_persistence=epsilon == 0)


def evaluate(model, samples, resolution=5):
    """Mean W2 (diagonal matching) and PIE on ground-truth image bounds."""
    if not samples:
        return float("nan"), float("nan")
    w2s, pies = [], []
    for sample in samples:
        pred = predict_diagram(model, sample.tensors)
        w2s.append(wasserstein2(pred, sample.diagram)[0])
        bounds, sigma = default_image_params(sample.diagram)
        pies.append(pie(persistence_image(pred, resolution, sigma, bounds),
                        persistence_image(sample.diagram, resolution, sigma, bounds)))
    return float(np.mean(w2s)), float(np.mean(pies))


@dataclass
class TrainResult:
    model: PDGNN
    history: pd.DataFrame
    train_index: List[int]
    test_index: List[int]


def split_dataset(n, cfg: TrainConfig):
    """80/20 split with sklearn; the training part is cut to train_fraction."""
    index = np.arange(n)
    if n < 2:
        train_idx, test_idx = index, np.zeros(0, dtype=np.int64)
    else:
        train_idx, test_idx = train_test_split(index, test_size=cfg.test_size, random_state=cfg.seed, shuffle=True)
    keep = max(1, math.ceil(cfg.train_fraction * len(train_idx)))
    return [int(i) for i in train_idx[:keep]], [int(i) for i in test_idx]


def train(cfg: TrainConfig, dataset, model=None, model_config=None, progress=None):
    """
    Mini-batch AdamW training with an 80/20 split.

    Arguments
    ---------
    cfg : TrainConfig
    dataset : list of TrainingSample
    model : start from this model (e.g. a loaded one) instead of init_params
    model_config : architecture of a fresh model
    progress : optional callable wrapping the epoch iterator (tqdm)

    Returns
    -------
    TrainResult; the history has one row per epoch, epoch 0 being the model
    before any update.
    """
    if not dataset:
        raise UsageError("cannot train on an empty dataset")
    torch.manual_seed(cfg.seed)
    if model is None:
        model = init_params(cfg.seed, model_config)
    train_idx, test_idx = split_dataset(len(dataset), cfg)
    train_set = [dataset[i] for i in train_idx]
    test_set = [dataset[i] for i in test_idx]
    log.info("training on %d graphs, testing on %d", len(train_set), len(test_set))

    state = AdamState(model, cfg)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    def record(epoch, train_loss):
        model.eval()
        test_w2, test_pie = evaluate(model, test_set, cfg.resolution)
        rows.append({"epoch": epoch, "train_loss": train_loss, "test_w2": test_w2, "test_pie": test_pie})
        log.info("epoch %d train_loss %.6g test_w2 %.6g test_pie %.6g", epoch, train_loss, test_w2, test_pie)

    rows = []
    with torch.no_grad():
        initial = float(batch_loss(model, train_set, cfg.loss_mode))
    record(0, initial)
    epochs = range(1, cfg.epochs + 1)
    for epoch in (progress(epochs) if progress else epochs):
        model.train()
        order = rng.permutation(len(train_set))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start:start + cfg.batch_size]]
            loss, grads = loss_and_grad(model, batch, cfg.loss_mode, cfg.dropout)
            adam_step(model, grads, state)
            total += loss * len(batch)
        record(epoch, total / len(train_set))
    model.eval()
    return TrainResult(model, pd.DataFrame(rows, columns=["epoch", "train_loss", "test_w2", "test_pie"]),
                       train_idx, test_idx)


###############
# MODEL FILES #
###############

MODEL_KEYS = [f.name for f in fields(ModelConfig)]


def save_model(path, model, fmt="text", run_config=None):
    """
    Versioned header, then the flat parameter vector as full-precision decimals
    (text) or raw little-endian float64 (binary) after the ``# end`` line.
    """
    if fmt not in MODEL_FORMATS:
        raise UsageError(f"unknown model format '{fmt}' (expected text or binary)")
    vector = flat_parameters(model).numpy()
    config = RunConfig(run_config or {})
    config["format"] = fmt
    config.update(asdict(model.config))
    config["count"] = len(vector)
    header = "\n".join(config.header_lines("model")) + "\n# end\n"
    with open(path, "wb") as f:
        f.write(header.encode())
        if fmt == "text":
            f.write("".join(f"{float(x)!r}\n" for x in vector).encode())
        else:
            f.write(vector.astype("<f8").tobytes())


def load_model(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise DataFormatError(f"cannot read model ({e.strerror})", path) from None
    magic = f"# {MAGIC} model {VERSION}\n".encode()
    if not data.startswith(magic):
        raise DataFormatError("not a graph2epd model file (bad magic line)", path, 1)
    end = data.find(b"\n# end\n")
    if end < 0:
        raise DataFormatError("model header has no '# end' line", path)
    header = {}
    for line in data[len(magic):end].decode().splitlines():
        key, _, value = line[1:].strip().partition(":")
        header[key.strip()] = value.strip()
    body = data[end + len(b"\n# end\n"):]
    try:
        count = int(header["count"])
        fmt = header["format"]
        kwargs = {k: header[k] for k in MODEL_KEYS}
        for k in ("hidden", "layers", "head_hidden"):
            kwargs[k] = int(kwargs[k])
    except (KeyError, ValueError) as e:
        raise DataFormatError(f"incomplete model header ({e})", path) from None
    if fmt == "binary":
        if len(body) != 8 * count:
            raise DataFormatError(f"expected {8 * count} bytes of parameters, found {len(body)}", path)
        vector = np.frombuffer(body, dtype="<f8").astype(np.float64)
    elif fmt == "text":
        try:
            vector = np.array([float(x) for x in body.decode().split()], dtype=np.float64)
        except ValueError as e:
            raise DataFormatError(f"invalid parameter value ({e})", path) from None
        if len(vector) != count:
            raise DataFormatError(f"expected {count} parameters, found {len(vector)}", path)
    else:
        raise DataFormatError(f"unknown model format '{fmt}'", path)
    model = PDGNN(ModelConfig(**kwargs))
    if count != parameter_count(model.config):
        raise DataFormatError(f"parameter count {count} does not match the architecture", path)
    set_flat_parameters(model, torch.from_numpy(vector.copy()))
    model.eval()
    return model


def model_header(path):
    """Model header entries without loading the parameters."""
    entries = {}
    with open(path, "rb") as f:
        for raw in f:
            if raw == b"# end\n" or not raw.startswith(b"#"):
                break
            key, sep, value = raw.decode(errors="replace")[1:].strip().partition(":")
            if sep:
                entries[key.strip()] = value.strip()
    return entries


def describe(model):
    return ", ".join(f"{k}={format_value(v)}" for k, v in asdict(model.config).items())
