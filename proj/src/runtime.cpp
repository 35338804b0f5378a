#include "phyloswarm/runtime.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace phyloswarm {

WorkerStats worker_loop(const FitnessEvaluator& evaluator, Channel& channel) {
  WorkerStats stats;
  std::string run_id;
  auto fail = [&](const std::string& why) {
    stats.error = why;
    try {
      channel.send(make_error(run_id, why));
    } catch (const ChannelClosed&) {
    }
    channel.close();
    return stats;
  };

  try {
    channel.send(make_hello(""));
    auto ack = channel.recv();
    if (!ack) {
      channel.close();
      return stats;
    }
    if (ack->kind != MessageKind::Hello) return fail("expected HELLO, got " + std::string(to_string(ack->kind)));
    if (ack->protocol_version != kProtocolVersion) {
      return fail("unsupported protocol_version " + std::to_string(ack->protocol_version));
    }
    run_id = ack->run_id;

    while (true) {
      auto message = channel.recv();
      if (!message) {
        channel.close();
        return stats;
      }
      switch (message->kind) {
        case MessageKind::Assign: {
          if (message->run_id != run_id) return fail("ASSIGN for foreign run " + message->run_id);
          const BinaryPosition word = BinaryPosition::from_string(message->word);
          const FitnessReport report = evaluator.evaluate(word);
          channel.send(make_result(run_id, message->iteration, message->particle_id, word, report));
          ++stats.assignments;
          break;
        }
        case MessageKind::Best:
          break;
        case MessageKind::Stop:
          stats.stopped = true;
          channel.close();
          return stats;
        default:
          return fail("unexpected " + std::string(to_string(message->kind)));
      }
    }
  } catch (const FrameError& e) {
    return fail(e.what());
  } catch (const ChannelClosed& e) {
    stats.error = e.what();
    channel.close();
    return stats;
  } catch (const std::exception& e) {
    return fail(std::string("evaluation failed: ") + e.what());
  }
}

void serve_worker(const FitnessEvaluator& evaluator, TcpListener& listener, std::size_t max_connections) {
  for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
    auto channel = listener.accept();
    if (!channel) return;
    worker_loop(evaluator, *channel);
  }
}

namespace {

using Clock = std::chrono::steady_clock;

struct Event {
  std::size_t worker = 0;
  std::optional<WireMessage> message;  // empty: hang-up or undecodable frame
  std::string problem;
};

class WorkerPool {
 public:
  WorkerPool(std::vector<std::unique_ptr<Channel>> channels, std::string run_id, std::vector<std::string>& events)
      : channels_(std::move(channels)), alive_(channels_.size(), false), run_id_(std::move(run_id)), log_(events) {
    for (std::size_t w = 0; w < channels_.size(); ++w) handshake(w);
    for (std::size_t w = 0; w < channels_.size(); ++w) {
      if (alive_[w]) readers_.emplace_back([this, w] { read_loop(w); });
    }
  }

  ~WorkerPool() {
    for (std::size_t w = 0; w < channels_.size(); ++w) {
      if (!alive_[w]) continue;
      try {
        channels_[w]->send(make_stop(run_id_));
      } catch (const ChannelClosed&) {
      }
    }
    // Queued frames still reach the peer after close.
    for (auto& c : channels_) c->close();
    for (auto& t : readers_) t.join();
  }

  std::size_t live_count() const {
    std::size_t n = 0;
    for (bool a : alive_) n += a;
    return n;
  }

  std::vector<FitnessReport> evaluate(std::size_t iteration, std::span<const BinaryPosition> positions,
                                      IterationTraffic& traffic, RunLedger& ledger) {
    const std::size_t count = positions.size();
    std::vector<std::optional<FitnessReport>> reports(count);
    std::vector<std::size_t> owner(count);
    std::vector<Clock::time_point> sent_at(count);
    std::vector<double> walls(count, 0.0);
    std::size_t pending = count;

    auto dispatch = [&](std::size_t particle) {
      while (true) {
        const std::vector<std::size_t> live = live_workers();
        if (live.empty()) throw std::runtime_error("all workers lost at iteration " + std::to_string(iteration));
        const std::size_t w = live[particle % live.size()];
        try {
          channels_[w]->send(make_assign(run_id_, iteration, particle, positions[particle]));
          owner[particle] = w;
          sent_at[particle] = Clock::now();
          ++traffic.assigns;
          return;
        } catch (const ChannelClosed&) {
          lose(w, iteration, "send failed");
        }
      }
    };
    auto reassign_from = [&](std::size_t w) {
      std::vector<std::size_t> moved;
      for (std::size_t i = 0; i < count; ++i) {
        if (!reports[i] && owner[i] == w) moved.push_back(i);
      }
      if (moved.empty()) return;
      std::ostringstream text;
      text << "iteration " << iteration << ": reassigning particles";
      for (std::size_t i : moved) text << ' ' << i;
      text << " from worker " << w;
      log_.push_back(text.str());
      for (std::size_t i : moved) dispatch(i);
    };

    for (std::size_t i = 0; i < count; ++i) dispatch(i);

    while (pending > 0) {
      Event event = next_event();
      const std::size_t w = event.worker;
      if (!event.message) {
        if (!alive_[w]) continue;
        lose(w, iteration, event.problem);
        reassign_from(w);
        continue;
      }
      const WireMessage& m = *event.message;
      if (!alive_[w]) continue;
      if (m.kind == MessageKind::Error) {
        lose(w, iteration, "worker reported error: " + m.detail);
        reassign_from(w);
        continue;
      }
      std::string problem;
      if (m.kind != MessageKind::Result) {
        problem = "unexpected " + std::string(to_string(m.kind));
      } else if (m.run_id != run_id_) {
        problem = "RESULT for foreign run " + m.run_id;
      } else if (m.iteration != iteration) {
        // Earlier iterations closed their barrier with one result per particle.
        ++traffic.duplicates;
        log_.push_back("iteration " + std::to_string(iteration) + ": duplicate RESULT for iteration " +
                       std::to_string(m.iteration) + " particle " + std::to_string(m.particle_id) + " ignored");
        continue;
      } else if (m.particle_id >= count) {
        problem = "RESULT for unknown particle " + std::to_string(m.particle_id);
      } else if (m.word != positions[m.particle_id].to_string()) {
        problem = "RESULT word does not match ASSIGN for particle " + std::to_string(m.particle_id);
      }
      if (!problem.empty()) {
        try {
          channels_[w]->send(make_error(run_id_, problem));
        } catch (const ChannelClosed&) {
        }
        lose(w, iteration, problem);
        reassign_from(w);
        continue;
      }
      const std::size_t particle = m.particle_id;
      if (reports[particle]) {
        ++traffic.duplicates;
        log_.push_back("iteration " + std::to_string(iteration) + ": duplicate RESULT for particle " +
                       std::to_string(particle) + " from worker " + std::to_string(w) + " ignored");
        continue;
      }
      reports[particle] = report_of(m);
      ++traffic.results;
      --pending;
      walls[particle] = std::chrono::duration<double>(Clock::now() - sent_at[particle]).count();
    }

    std::vector<FitnessReport> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      ledger.append({iteration, i, positions[i], *reports[i], walls[i]});
      out.push_back(std::move(*reports[i]));
    }
    return out;
  }

  void broadcast(const WireMessage& message, std::size_t iteration) {
    for (std::size_t w = 0; w < channels_.size(); ++w) {
      if (!alive_[w]) continue;
      try {
        channels_[w]->send(message);
      } catch (const ChannelClosed&) {
        lose(w, iteration, "send failed");
      }
    }
  }

 private:
  void handshake(std::size_t w) {
    Channel& channel = *channels_[w];
    try {
      auto hello = channel.recv();
      if (!hello) {
        log_.push_back("worker " + std::to_string(w) + " hung up before HELLO");
        channel.close();
        return;
      }
      if (hello->kind != MessageKind::Hello || hello->protocol_version != kProtocolVersion) {
        const std::string why = "bad handshake: " + std::string(to_string(hello->kind)) + " version " +
                                std::to_string(hello->protocol_version);
        channel.send(make_error(run_id_, why));
        log_.push_back("worker " + std::to_string(w) + " rejected: " + why);
        channel.close();
        return;
      }
      channel.send(make_hello(run_id_));
      alive_[w] = true;
    } catch (const std::exception& e) {
      log_.push_back("worker " + std::to_string(w) + " rejected: " + e.what());
      try {
        channel.send(make_error(run_id_, e.what()));
      } catch (const ChannelClosed&) {
      }
      channel.close();
    }
  }

  void read_loop(std::size_t w) {
    Channel& channel = *channels_[w];
    while (true) {
      Event event{w, std::nullopt, {}};
      bool done = false;
      try {
        auto frame = channel.recv_frame();
        if (frame) {
          event.message = decode_frame(*frame);
        } else {
          event.problem = "connection closed";
          done = true;
        }
      } catch (const FrameError& e) {
        event.problem = e.what();
        try {
          channel.send(make_error(run_id_, e.what()));
        } catch (const ChannelClosed&) {
        }
        channel.close();
        done = true;
      } catch (const std::exception& e) {
        event.problem = e.what();
        done = true;
      }
      {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(event));
      }
      ready_.notify_one();
      if (done) return;
    }
  }

  Event next_event() {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return !queue_.empty(); });
    Event event = std::move(queue_.front());
    queue_.pop_front();
    return event;
  }

  std::vector<std::size_t> live_workers() const {
    std::vector<std::size_t> live;
    for (std::size_t w = 0; w < alive_.size(); ++w) {
      if (alive_[w]) live.push_back(w);
    }
    return live;
  }

  void lose(std::size_t w, std::size_t iteration, const std::string& why) {
    if (!alive_[w]) return;
    alive_[w] = false;
    channels_[w]->close();
    log_.push_back("iteration " + std::to_string(iteration) + ": worker " + std::to_string(w) + " lost (" + why +
                   ")");
  }

  std::vector<std::unique_ptr<Channel>> channels_;
  std::vector<bool> alive_;
  std::string run_id_;
  std::vector<std::string>& log_;
  std::vector<std::thread> readers_;
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<Event> queue_;
};

}  // namespace

MasterOutcome master_loop(std::size_t instance_size, const EngineConfig& cfg,
                          std::vector<std::unique_ptr<Channel>> workers, const MasterOptions& options) {
  cfg.validate();
  MasterOutcome outcome;
  WorkerPool pool(std::move(workers), options.run_id, outcome.events);
  outcome.registered_workers = pool.live_count();
  if (outcome.registered_workers == 0) throw std::runtime_error("no worker completed the HELLO handshake");

  outcome.ledger.header["run_id"] = options.run_id;
  outcome.ledger.header["method"] = std::string(to_string(cfg.variant));
  outcome.ledger.header["particles"] = std::to_string(cfg.particles);
  outcome.ledger.header["N"] = std::to_string(instance_size);
  outcome.ledger.header["seed"] = std::to_string(cfg.seed);
  outcome.ledger.header["workers"] = std::to_string(outcome.registered_workers);

  BatchEvaluator batch = [&](std::size_t iteration, std::span<const BinaryPosition> positions) {
    if (outcome.traffic.size() <= iteration) outcome.traffic.resize(iteration + 1);
    return pool.evaluate(iteration, positions, outcome.traffic[iteration], outcome.ledger);
  };
  IterationObserver announce = [&](const SwarmState& state) {
    pool.broadcast(make_best(options.run_id, state.iteration, state.global_best_position,
                             state.global_best_report.fitness),
                   state.iteration);
  };
  outcome.run = run_swarm(instance_size, cfg, batch, announce);
  return outcome;
}

std::string_view to_string(Transport transport) noexcept {
  return transport == Transport::Local ? "local" : "tcp";
}

Transport parse_transport(std::string_view text) {
  if (text == "local") return Transport::Local;
  if (text == "tcp") return Transport::Tcp;
  throw std::invalid_argument("transport must be local or tcp, got '" + std::string(text) + "'");
}

WorkerCluster::WorkerCluster(const FitnessEvaluator& evaluator, std::size_t workers, Transport transport)
    : transport_(transport), stats_(workers) {
  if (workers == 0) throw std::invalid_argument("worker cluster needs at least one worker");
  for (std::size_t w = 0; w < workers; ++w) {
    if (transport == Transport::Local) {
      auto [master_end, worker_end] = make_loopback_pair();
      master_ends_.push_back(std::move(master_end));
      threads_.emplace_back([&evaluator, this, w, channel = std::shared_ptr<Channel>(std::move(worker_end))] {
        stats_[w] = worker_loop(evaluator, *channel);
      });
    } else {
      listeners_.push_back(std::make_unique<TcpListener>(0));
      TcpListener* listener = listeners_.back().get();
      threads_.emplace_back([&evaluator, this, w, listener] {
        auto channel = listener->accept();
        if (channel) stats_[w] = worker_loop(evaluator, *channel);
      });
    }
  }
}

WorkerCluster::~WorkerCluster() { join(); }

std::vector<std::unique_ptr<Channel>> WorkerCluster::connect() {
  if (transport_ == Transport::Local) return std::move(master_ends_);
  std::vector<std::unique_ptr<Channel>> ends;
  for (const auto& listener : listeners_) ends.push_back(connect_tcp("127.0.0.1", listener->port()));
  return ends;
}

std::vector<WorkerStats> WorkerCluster::join() {
  for (auto& end : master_ends_) {
    if (end) end->close();
  }
  for (auto& listener : listeners_) listener->close();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  return stats_;
}

MasterOutcome run_distributed(std::size_t instance_size, const EngineConfig& cfg, const FitnessEvaluator& evaluator,
                              std::size_t workers, Transport transport, const MasterOptions& options) {
  WorkerCluster cluster(evaluator, workers, transport);
  MasterOutcome outcome = master_loop(instance_size, cfg, cluster.connect(), options);
  outcome.ledger.header["transport"] = std::string(to_string(transport));
  cluster.join();
  return outcome;
}

}  // namespace phyloswarm
