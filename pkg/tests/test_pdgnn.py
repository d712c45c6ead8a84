import math

import numpy as np
import pytest
import torch

from conftest import random_graph
from graph_epd.errors import DataFormatError, UsageError
from graph_epd.filtration import build_filtration, degree_filter
from graph_epd.graph import SbmConfig, build_graph, khop_vicinity, sbm_generate
from graph_epd.pdgnn import (VARIANTS, AdamState, MessageLayer, ModelConfig, PDGNN, TrainConfig, adam_step,
                             batch_loss, evaluate, flat_parameters, forward, graph_loss, graph_tensors, init_params,
                             load_model, loss_and_grad, loss_of_flat, make_sample, model_header, parameter_count,
                             predict_diagram, save_model, set_flat_parameters, split_dataset, train)


def degree_fg(g):
    return build_filtration(g, degree_filter(g))


def sbm_samples(count, seed=0, k=1):
    samples = []
    while len(samples) < count:
        g = sbm_generate(SbmConfig(60, 3, 0.3, 0.05, seed=seed))
        for center in range(min(60, count - len(samples))):
            sub, _ = khop_vicinity(g, center, k)
            samples.append(make_sample(f"g{seed}_v{center}", degree_fg(sub)))
        seed += 1
    return samples


@pytest.fixture(scope="module")
def sbm_dataset():
    return sbm_samples(200)


@pytest.fixture(scope="module")
def trained_pdgnn(sbm_dataset):
    return train(TrainConfig(epochs=20, seed=0), sbm_dataset)


class TestArchitecture:

    def test_default_parameter_count(self):
        model = init_params(0)
        assert parameter_count(model.config) == 23271
        assert flat_parameters(model).numel() == 23271

    @pytest.mark.parametrize("variant", sorted(VARIANTS))
    def test_variant_counts(self, variant):
        config = ModelConfig.from_variant(variant, hidden=8, layers=2, head_hidden=4)
        assert flat_parameters(PDGNN(config)).numel() == parameter_count(config)

    def test_unknown_variant(self):
        with pytest.raises(UsageError):
            ModelConfig.from_variant("gcn")

    def test_invalid_flags(self):
        with pytest.raises(UsageError):
            ModelConfig(head_mode="sorted")
        with pytest.raises(UsageError):
            ModelConfig(hidden=0)

    def test_same_seed_same_parameters(self):
        assert torch.equal(flat_parameters(init_params(5)), flat_parameters(init_params(5)))
        assert not torch.equal(flat_parameters(init_params(5)), flat_parameters(init_params(6)))

    def test_prelu_slopes_start_at_quarter(self):
        model = init_params(1)
        assert all(layer.act.weight.item() == 0.25 for layer in model.layers)


class TestForward:

    def test_one_pair_per_edge(self, cycle4_fg):
        assert forward(init_params(0), cycle4_fg).shape == (4, 2)

    def test_zero_network(self, cycle4_fg):
        model = init_params(0)
        set_flat_parameters(model, torch.zeros(parameter_count(model.config)))
        assert torch.count_nonzero(forward(model, cycle4_fg)) == 0

    def test_vertex_transitive_graph(self, cycle4):
        out = forward(init_params(3), build_filtration(cycle4, np.ones(4))).detach()
        assert torch.allclose(out, out[0].expand_as(out), atol=1e-12)

    def test_min_reads_only_the_smallest_message(self, star3):
        layer = MessageLayer(1, 1, ModelConfig(message="node", edge_weight="none", hidden=1)).double()
        with torch.no_grad():
            layer.W.weight.fill_(1.0)
            layer.W.bias.zero_()
            layer.U.weight.copy_(torch.tensor([[0.0, 1.0, 0.0]]))
            layer.U.bias.zero_()
        graph = graph_tensors(build_filtration(star3, np.zeros(4)))

        def centre(values):
            h = torch.tensor(values, dtype=torch.float64).reshape(-1, 1).requires_grad_()
            out = layer(h, graph.neighbors, graph.mask)[0, 0]
            out.backward()
            return out.item(), h.grad[:, 0].tolist()

        out, grad = centre([0.0, 1.0, 2.0, 3.0])
        assert out == 1.0
        assert grad == [0.0, 1.0, 0.0, 0.0]
        assert centre([0.0, 1.0, 2.5, 3.0])[0] == 1.0
        assert centre([0.0, 1.5, 2.0, 3.0])[0] == 1.5

    def test_isolated_vertex(self):
        fg = build_filtration(build_graph(3, [(0, 1)]), [0.0, 1.0, 2.0])
        out = forward(init_params(0), fg)
        assert torch.isfinite(out).all()

    def test_relabelling_with_symmetric_head(self):
        rng = np.random.default_rng(8)
        g = random_graph(rng, max_vertices=9, p=0.5)
        values = rng.random(g.num_vertices)
        perm = rng.permutation(g.num_vertices)
        h = build_graph(g.num_vertices, [(perm[u], perm[v]) for u, v in g.edges])
        moved = np.empty_like(values)
        moved[perm] = values
        model = init_params(2, ModelConfig(head_mode="symmetric"))
        out_g = forward(model, build_filtration(g, values)).detach()
        out_h = forward(model, build_filtration(h, moved)).detach()
        index = h.edge_index()
        for e, (u, v) in enumerate(g.edges):
            a, b = sorted((int(perm[u]), int(perm[v])))
            assert torch.allclose(out_g[e], out_h[index[(a, b)]], atol=1e-10)

    def test_rejects_bad_vector(self):
        with pytest.raises(DataFormatError):
            set_flat_parameters(init_params(0), torch.zeros(3))


class TestLoss:

    def test_exact_prediction(self, cycle4_fg):
        pred = forward(init_params(0), cycle4_fg)
        loss = graph_loss(pred, pred.detach())
        loss.backward()
        assert loss.item() == 0.0

    def test_zero_gradient_at_exact_prediction(self, cycle4_fg):
        pred = forward(init_params(0), cycle4_fg).detach().requires_grad_()
        graph_loss(pred, pred.detach().flip(0)).backward()
        assert torch.count_nonzero(pred.grad) == 0

    def test_per_edge_loss(self):
        pred = torch.tensor([[0.0, 0.0], [2.0, 2.0]], dtype=torch.float64)
        target = torch.tensor([[2.0, 3.0], [0.0, 1.0]], dtype=torch.float64)
        assert graph_loss(pred, target).item() == pytest.approx(2.0)
        assert graph_loss(pred, target, "per-edge").item() == pytest.approx(18.0)

    def test_target_count_mismatch(self, cycle4_fg):
        sample = make_sample("c", cycle4_fg)
        sample.targets = sample.targets[:3]
        with pytest.raises(DataFormatError):
            batch_loss(init_params(0), [sample])

    def test_gradient_matches_finite_differences(self):
        config = ModelConfig(hidden=4, layers=2, head_hidden=4)
        model = init_params(7, config)
        batch = sbm_samples(2)
        vector = flat_parameters(model).requires_grad_()
        loss = loss_of_flat(model, batch, "per-edge")
        assert torch.autograd.gradcheck(loss, (vector,), eps=1e-5, atol=1e-6, rtol=1e-4)

    def test_forced_gradient_matches_finite_differences(self):
        config = ModelConfig(hidden=4, layers=2, head_hidden=4)
        model = init_params(7, config)
        vector = flat_parameters(model).requires_grad_()
        loss = loss_of_flat(model, sbm_samples(2))
        assert torch.autograd.gradcheck(loss, (vector,), eps=1e-5, atol=1e-6, rtol=1e-4)

    def test_loss_and_grad_shapes(self):
        model = init_params(0)
        loss, grads = loss_and_grad(model, sbm_samples(2))
        assert loss > 0
        assert [g.shape for g in grads] == [p.shape for p in model.parameters()]


class TestOptimizer:

    def test_one_step_by_hand(self):
        cfg = TrainConfig(learning_rate=0.01, weight_decay=0.1)
        model = init_params(0, ModelConfig(hidden=4, layers=1, head_hidden=4))
        before = flat_parameters(model)
        grads = tuple(torch.full_like(p, -0.5) for p in model.parameters())
        state = AdamState(model, cfg)
        adam_step(model, grads, state)
        expected = before * (1 - 0.01 * 0.1) - 0.01 * (-0.5) / (0.5 + cfg.eps)
        assert torch.allclose(flat_parameters(model), expected, rtol=0, atol=1e-14)
        assert state.step == 1

    def test_zero_gradient_only_decays(self):
        cfg = TrainConfig(learning_rate=0.002, weight_decay=0.01)
        model = init_params(0, ModelConfig(hidden=4, layers=1, head_hidden=4))
        before = flat_parameters(model)
        adam_step(model, tuple(torch.zeros_like(p) for p in model.parameters()), AdamState(model, cfg))
        assert torch.allclose(flat_parameters(model), before * (1 - 0.002 * 0.01), rtol=0, atol=1e-15)

    @pytest.mark.parametrize("kwargs", [dict(learning_rate=-1), dict(batch_size=0), dict(loss_mode="l1"),
                                        dict(train_fraction=0), dict(dropout=1.0)])
    def test_config_validation(self, kwargs):
        with pytest.raises(UsageError):
            TrainConfig(**kwargs)


class TestTraining:

    def test_split(self):
        train_idx, test_idx = split_dataset(10, TrainConfig(seed=1))
        assert len(train_idx) == 8
        assert len(test_idx) == 2
        assert not set(train_idx) & set(test_idx)
        assert len(split_dataset(10, TrainConfig(train_fraction=0.5))[0]) == 4

    def test_zero_learning_rate_keeps_parameters(self):
        config = ModelConfig(hidden=8, layers=2, head_hidden=8)
        samples = sbm_samples(6)
        result = train(TrainConfig(learning_rate=0.0, epochs=2, batch_size=2), samples, model_config=config)
        assert torch.equal(flat_parameters(result.model), flat_parameters(init_params(0, config)))
        assert result.history["epoch"].tolist() == [0, 1, 2]

    def test_runs_are_identical(self):
        config = ModelConfig(hidden=8, layers=2, head_hidden=8)
        cfg = TrainConfig(epochs=2, batch_size=3, seed=4)
        first = train(cfg, sbm_samples(8), model_config=config)
        second = train(cfg, sbm_samples(8), model_config=config)
        assert torch.equal(flat_parameters(first.model), flat_parameters(second.model))
        assert first.history.equals(second.history)

    def test_empty_dataset(self):
        with pytest.raises(UsageError):
            train(TrainConfig(), [])

    def test_single_sample_has_no_test_metrics(self, cycle4_fg):
        result = train(TrainConfig(epochs=1), [make_sample("c", cycle4_fg)],
                       model_config=ModelConfig(hidden=4, layers=1, head_hidden=4))
        assert result.test_index == []
        assert math.isnan(result.history["test_w2"].iloc[-1])

    @pytest.mark.slow
    def test_training_beats_initial_model(self, trained_pdgnn):
        history = trained_pdgnn.history
        assert history["test_w2"].iloc[-1] <= 0.5 * history["test_w2"].iloc[0]
        held_out = sbm_samples(20, seed=100)
        trained, _ = evaluate(trained_pdgnn.model, held_out)
        untrained, _ = evaluate(init_params(0), held_out)
        assert trained < untrained

    @pytest.mark.slow
    def test_edge_messages_beat_node_messages(self, sbm_dataset, trained_pdgnn):
        gat = train(TrainConfig(epochs=20, seed=0), sbm_dataset, model_config=ModelConfig.from_variant("gat"))
        assert trained_pdgnn.history["test_w2"].iloc[-1] < gat.history["test_w2"].iloc[-1]


class TestPrediction:

    def test_epsilon_zero_keeps_every_edge(self, example_fg):
        diagram = predict_diagram(init_params(0), example_fg)
        assert len(diagram) == example_fg.num_edges
        assert all(p.death < p.birth for p in diagram.dim1)

    def test_infinite_epsilon(self, example_fg):
        assert len(predict_diagram(init_params(0), example_fg, math.inf)) == 0


class TestModelFiles:

    @pytest.mark.parametrize("fmt", ["text", "binary"])
    def test_parameters_survive(self, tmp_path, fmt):
        model = init_params(3, ModelConfig.from_variant("gat_min", head_mode="symmetric"))
        path = str(tmp_path / f"m_{fmt}.pdgnn")
        save_model(path, model, fmt, {"seed": 3})
        loaded = load_model(path)
        assert loaded.config == model.config
        assert torch.equal(flat_parameters(loaded), flat_parameters(model))
        header = model_header(path)
        assert header["format"] == fmt
        assert header["variant"] == "gat_min"
        assert header["seed"] == "3"

    def test_unknown_format(self, tmp_path):
        with pytest.raises(UsageError):
            save_model(str(tmp_path / "m.pdgnn"), init_params(0), "json")

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.pdgnn"
        path.write_text("# something else\n")
        with pytest.raises(DataFormatError) as info:
            load_model(str(path))
        assert info.value.line == 1

    def test_truncated_parameters(self, tmp_path):
        path = str(tmp_path / "m.pdgnn")
        save_model(path, init_params(0), "text")
        with open(path) as f:
            lines = f.readlines()
        with open(path, "w") as f:
            f.writelines(lines[:-5])
        with pytest.raises(DataFormatError, match="expected 23271 parameters"):
            load_model(path)
