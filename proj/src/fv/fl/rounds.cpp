#include "fv/fl/rounds.hpp"

#include <chrono>

#include "fv/errors.hpp"
#include "fv/util/parallel.hpp"

namespace fv::fl {
namespace {

using Clock = std::chrono::steady_clock;

LocalTrainOptions train_options(const FlOptions& opt, bool prox) {
  LocalTrainOptions t;
  t.epochs = opt.local_epochs;
  t.batch = opt.batch;
  t.lr = opt.lr;
  t.optimizer = opt.optimizer;
  t.prox_mu = prox ? opt.prox_mu : 0.0;
  return t;
}

data::Dataset concat(const data::Dataset& a, const data::Dataset& b) {
  data::Dataset out = a;
  out.frames.insert(out.frames.end(), b.frames.begin(), b.frames.end());
  return out;
}

// Runs the members' local training concurrently; results land in id order so
// scheduling cannot change the aggregate.
std::vector<TrainResult> train_members(const std::vector<int>& members,
                                       std::vector<ClientState>& clients,
                                       const nn::ModelParams& start,
                                       const std::vector<nn::LayerSpec>& stack,
                                       const nn::FeatShape& input, const LocalTrainOptions& topt,
                                       const FlOptions& opt, int round) {
  std::vector<TrainResult> results(members.size());
  util::parallel_for(members.size(), opt.threads, [&](size_t k) {
    const int id = members[k];
    Rng rng = derive_rng(opt.seed, "train", static_cast<uint64_t>(round),
                         static_cast<uint64_t>(id));
    results[k] = local_train(clients[static_cast<size_t>(id)].current_data, start, stack, input,
                             topt, rng);
  });
  return results;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FEDVACCINE: return "fedvaccine";
    case Algorithm::FEDVACCINE_CHAIN: return "chain";
    case Algorithm::FEDAVG: return "fedavg";
    case Algorithm::FEDSGD: return "fedsgd";
    case Algorithm::FEDPROX: return "fedprox";
    case Algorithm::GL: return "gl";
    case Algorithm::CL: return "cl";
    case Algorithm::DISTL: return "distl";
  }
  return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Algorithm::DISTL); ++i) {
    auto a = static_cast<Algorithm>(i);
    if (name == algorithm_name(a)) return a;
  }
  throw ConfigError("unknown algorithm: " + name);
}

std::vector<RoundMetrics> run_federated(const FlOptions& opt, const data::Dataset& train_pool,
                                        const data::Dataset& test_pool,
                                        const std::vector<nn::LayerSpec>& stack,
                                        const nn::FeatShape& input, nn::ModelParams* final_model) {
  const int classes = train_pool.class_count();
  const bool vaccine_family =
      opt.algo == Algorithm::FEDVACCINE || opt.algo == Algorithm::FEDVACCINE_CHAIN;

  GlobalState state;
  state.global_model = nn::init_model(stack, input, StreamKey(opt.seed).tag("init").value());

  std::vector<ClientState> clients;
  clients.reserve(static_cast<size_t>(opt.clients));
  for (int i = 0; i < opt.clients; ++i) {
    clients.emplace_back(i, opt.queue_capacity, classes);
    if (opt.algo == Algorithm::DISTL) {
      clients.back().model =
          nn::init_model(stack, input, StreamKey(opt.seed).tag("init-client").idx(i).value());
    }
  }

  data::Dataset gl_pool;  // grows across rounds for the pool-everything mode
  gl_pool.meta = train_pool.meta;

  const auto test_frames = test_pool.frame_ptrs();
  std::vector<RoundMetrics> history;
  history.reserve(static_cast<size_t>(opt.global_epochs));

  for (int round = 1; round <= opt.global_epochs; ++round) {
    const auto t_start = Clock::now();
    state.round = round;
    RoundMetrics rm;
    rm.round = round;
    rm.algorithm = algorithm_name(opt.algo);

    // Fresh data draw; identical streams for every algorithm.
    for (ClientState& c : clients) {
      Rng rng = derive_rng(opt.seed, "data", static_cast<uint64_t>(round),
                           static_cast<uint64_t>(c.id));
      data::Dataset fresh = data::sample_scenario(opt.scenario, train_pool, c.id, round, rng);
      if (vaccine_family) {
        c.queue.insert(fresh, round);
        data::Dataset kept = data::filter_by_snr(fresh, opt.theta_db);
        c.queue.evict();
        c.current_data = round > 1 ? concat(kept, c.queue.contents()) : std::move(kept);
      } else {
        c.current_data = std::move(fresh);
      }
      c.delta = c.current_data.size();
    }

    switch (opt.algo) {
      case Algorithm::FEDVACCINE: {
        Rng plan_rng = derive_rng(opt.seed, "plan", static_cast<uint64_t>(round));
        const ClusterPlan plan = partition_clusters(opt.clients, opt.clusters, plan_rng);
        for (const auto& members : plan.clusters) {
          auto results = train_members(members, clients, state.global_model, stack, input,
                                       train_options(opt, false), opt, round);
          std::vector<WeightedParams> collected;
          for (size_t k = 0; k < members.size(); ++k) {
            if (results[k].skipped) {
              rm.skipped_clients += 1;
              continue;
            }
            collected.push_back({&results[k].params, static_cast<double>(results[k].delta)});
          }
          if (collected.empty()) {
            rm.skipped_clusters += 1;
            continue;
          }
          state.global_model = aggregate_fedvaccine(state.global_model, collected);
        }
        break;
      }

      case Algorithm::FEDVACCINE_CHAIN: {
        for (ClientState& c : clients) {
          if (c.current_data.empty()) {
            rm.skipped_clients += 1;
            continue;
          }
          Rng rng = derive_rng(opt.seed, "train", static_cast<uint64_t>(round),
                               static_cast<uint64_t>(c.id));
          TrainResult r =
              local_train(c.current_data, state.global_model, stack, input,
                          train_options(opt, false), rng);
          state.global_model = std::move(r.params);
        }
        break;
      }

      case Algorithm::FEDAVG:
      case Algorithm::FEDPROX: {
        std::vector<int> everyone(static_cast<size_t>(opt.clients));
        for (int i = 0; i < opt.clients; ++i) everyone[static_cast<size_t>(i)] = i;
        auto results = train_members(everyone, clients, state.global_model, stack, input,
                                     train_options(opt, opt.algo == Algorithm::FEDPROX), opt,
                                     round);
        std::vector<WeightedParams> collected;
        for (size_t k = 0; k < results.size(); ++k) {
          if (results[k].skipped) {
            rm.skipped_clients += 1;
            continue;
          }
          collected.push_back({&results[k].params, static_cast<double>(results[k].delta)});
        }
        if (!collected.empty()) {
          state.global_model = aggregate_fedavg(collected);
        }
        break;
      }

      case Algorithm::FEDSGD: {
        std::vector<nn::ModelParams> grads(static_cast<size_t>(opt.clients));
        std::vector<double> weights(static_cast<size_t>(opt.clients), 0.0);
        util::parallel_for(static_cast<size_t>(opt.clients), opt.threads, [&](size_t i) {
          ClientState& c = clients[i];
          if (c.current_data.empty()) return;
          Rng rng = derive_rng(opt.seed, "train", static_cast<uint64_t>(round),
                               static_cast<uint64_t>(c.id));
          grads[i] = local_gradient(c.current_data, state.global_model, stack, input, opt.batch,
                                    rng);
          weights[i] = static_cast<double>(c.current_data.size());
        });
        double total = 0.0;
        for (double w : weights) total += w;
        if (total > 0.0) {
          // One server step along the weighted mean gradient.
          for (size_t l = 0; l < state.global_model.layers.size(); ++l) {
            for (size_t t = 0; t < state.global_model.layers[l].tensors.size(); ++t) {
              double* w = state.global_model.layers[l].tensors[t].ptr();
              const size_t n = state.global_model.layers[l].tensors[t].size();
              for (size_t i = 0; i < grads.size(); ++i) {
                if (weights[i] <= 0.0) continue;
                const double q = weights[i] / total;
                const double* g = grads[i].layers[l].tensors[t].ptr();
                for (size_t k = 0; k < n; ++k) w[k] -= opt.lr * q * g[k];
              }
            }
          }
        } else {
          rm.skipped_clients = opt.clients;
        }
        break;
      }

      case Algorithm::GL: {
        for (ClientState& c : clients) {
          gl_pool.frames.insert(gl_pool.frames.end(), c.current_data.frames.begin(),
                                c.current_data.frames.end());
        }
        if (round == opt.global_epochs && !gl_pool.empty()) {
          Rng rng = derive_rng(opt.seed, "train", static_cast<uint64_t>(round), 0);
          TrainResult r = local_train(gl_pool, state.global_model, stack, input,
                                      train_options(opt, false), rng);
          state.global_model = std::move(r.params);
          state.cumulative_trained_samples += r.delta;
          rm.server_trained_samples = r.delta;
        }
        break;
      }

      case Algorithm::CL: {
        data::Dataset pooled;
        pooled.meta = train_pool.meta;
        for (ClientState& c : clients) {
          pooled.frames.insert(pooled.frames.end(), c.current_data.frames.begin(),
                               c.current_data.frames.end());
        }
        if (!pooled.empty()) {
          Rng rng = derive_rng(opt.seed, "train", static_cast<uint64_t>(round), 0);
          TrainResult r = local_train(pooled, state.global_model, stack, input,
                                      train_options(opt, false), rng);
          state.global_model = std::move(r.params);
          state.cumulative_trained_samples += r.delta;
          rm.server_trained_samples = r.delta;
        }
        break;
      }

      case Algorithm::DISTL: {
        util::parallel_for(static_cast<size_t>(opt.clients), opt.threads, [&](size_t i) {
          ClientState& c = clients[i];
          if (c.current_data.empty()) return;
          Rng rng = derive_rng(opt.seed, "train", static_cast<uint64_t>(round),
                               static_cast<uint64_t>(c.id));
          TrainResult r =
              local_train(c.current_data, c.model, stack, input, train_options(opt, false), rng);
          c.model = std::move(r.params);
        });
        break;
      }
    }

    // Round metrics.
    for (const ClientState& c : clients) rm.client_deltas.push_back(c.delta);
    if (opt.algo == Algorithm::DISTL) {
      double mean_acc = 0.0;
      double mean_loss = 0.0;
      std::map<int, double> mean_snr;
      for (ClientState& c : clients) {
        nn::EvalResult ev = nn::evaluate(c.model, stack, input, test_frames, opt.eval_batch);
        rm.client_accuracy.push_back(ev.accuracy);
        mean_acc += ev.accuracy;
        mean_loss += ev.loss;
        for (const auto& [snr, acc] : ev.per_snr_accuracy) mean_snr[snr] += acc;
      }
      rm.accuracy = mean_acc / opt.clients;
      rm.loss = mean_loss / opt.clients;
      for (auto& [snr, acc] : mean_snr) rm.per_snr_accuracy[snr] = acc / opt.clients;
    } else {
      nn::EvalResult ev =
          nn::evaluate(state.global_model, stack, input, test_frames, opt.eval_batch);
      rm.accuracy = ev.accuracy;
      rm.loss = ev.loss;
      rm.per_snr_accuracy = std::move(ev.per_snr_accuracy);
    }
    rm.wall_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
    history.push_back(std::move(rm));
  }

  if (final_model) *final_model = std::move(state.global_model);
  return history;
}

}  // namespace fv::fl
