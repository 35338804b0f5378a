#pragma once

// Master/worker evaluation of a swarm. The master owns the engine and every
// random draw; workers only turn words into reports. Per iteration the master
// sends one ASSIGN per particle (particle i to live worker i mod K), waits for
// all RESULTs, folds them in particle order, then broadcasts BEST.
//
// Handshake: a worker opens with HELLO (empty run_id); the master answers
// HELLO carrying the run_id. STOP ends the session. Either side answers a
// frame it cannot decode with ERROR and closes.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "phyloswarm/channel.hpp"
#include "phyloswarm/engine.hpp"
#include "phyloswarm/fitness.hpp"
#include "phyloswarm/ledger.hpp"

namespace phyloswarm {

struct WorkerStats {
  std::size_t assignments = 0;
  bool stopped = false;  // left on STOP rather than on error or hang-up
  std::string error;
};

WorkerStats worker_loop(const FitnessEvaluator& evaluator, Channel& channel);

/// Serves connections one after another; max_connections 0 means forever.
void serve_worker(const FitnessEvaluator& evaluator, TcpListener& listener, std::size_t max_connections = 0);

struct IterationTraffic {
  std::size_t assigns = 0;
  std::size_t results = 0;     // accepted, one per particle
  std::size_t duplicates = 0;
};

struct MasterOptions {
  std::string run_id = "run";
};

struct MasterOutcome {
  SwarmRun run;
  RunLedger ledger;
  std::vector<std::string> events;        // worker loss, reassignment, duplicates, protocol errors
  std::vector<IterationTraffic> traffic;  // index = iteration
  std::size_t registered_workers = 0;
};

/// Throws std::runtime_error when no worker completes the handshake or when
/// every worker is lost mid-run.
MasterOutcome master_loop(std::size_t instance_size, const EngineConfig& cfg,
                          std::vector<std::unique_ptr<Channel>> workers, const MasterOptions& options = {});

enum class Transport { Local, Tcp };

std::string_view to_string(Transport transport) noexcept;
Transport parse_transport(std::string_view text);

/// K worker threads sharing one evaluator, reachable over loopback channels
/// or over TCP on ephemeral localhost ports.
class WorkerCluster {
 public:
  WorkerCluster(const FitnessEvaluator& evaluator, std::size_t workers, Transport transport);
  ~WorkerCluster();
  WorkerCluster(const WorkerCluster&) = delete;
  WorkerCluster& operator=(const WorkerCluster&) = delete;

  /// Master-side endpoints, one per worker. Call once.
  std::vector<std::unique_ptr<Channel>> connect();
  std::vector<WorkerStats> join();

 private:
  Transport transport_;
  std::vector<std::unique_ptr<Channel>> master_ends_;
  std::vector<std::unique_ptr<TcpListener>> listeners_;
  std::vector<WorkerStats> stats_;
  std::vector<std::thread> threads_;
};

MasterOutcome run_distributed(std::size_t instance_size, const EngineConfig& cfg, const FitnessEvaluator& evaluator,
                              std::size_t workers, Transport transport, const MasterOptions& options = {});

}  // namespace phyloswarm
