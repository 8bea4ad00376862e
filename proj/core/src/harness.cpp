#include "parley/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "parley/config.hpp"
#include "parley/error.hpp"
#include "parley/lm_agent.hpp"

namespace parley {

using nlohmann::json;

std::string Permutation::label() const {
  std::ostringstream out;
  out << "a-side" << model_a_side << "-" << (starter_model == 0 ? "a" : "b") << "starts";
  return out.str();
}

std::array<Permutation, 4> debias_permutations() {
  return {Permutation{0, 0}, Permutation{0, 1}, Permutation{1, 0}, Permutation{1, 1}};
}

AgentDescriptor scripted_descriptor(const ScriptedStrategy& strategy, std::string id) {
  strategy.validate();
  AgentDescriptor descriptor;
  descriptor.id = std::move(id);
  descriptor.make_backend = [strategy, backend_id = descriptor.id]() {
    return std::make_shared<ScriptedAgent>(strategy, backend_id);
  };
  return descriptor;
}

namespace {

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, delim)) parts.push_back(part);
  return parts;
}

std::string sanitize_filename(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') {
      c = '-';
    }
  }
  return out;
}

Visibility visibility_from_string(const std::string& text) {
  const int level = std::stoi(text);
  if (level < 1 || level > 3) throw ConfigError("visibility must be 1, 2, or 3");
  return static_cast<Visibility>(level);
}

}  // namespace

AgentDescriptor parse_agent_spec(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("agent spec must look like scripted:<family>,... or lm:<file>: '" +
                      spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::vector<std::string> parts = split(spec.substr(colon + 1), ',');
  if (parts.empty()) throw ConfigError("agent spec missing arguments: '" + spec + "'");

  std::map<std::string, std::string> keyed;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::size_t eq = parts[i].find('=');
    if (eq == std::string::npos) {
      throw ConfigError("agent spec option must be key=value: '" + parts[i] + "'");
    }
    keyed[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }

  if (kind == "scripted") {
    ScriptedStrategy strategy;
    strategy.family = strategy_family_from_string(parts[0]);
    if (auto it = keyed.find("u_min"); it != keyed.end()) strategy.u_min = std::stod(it->second);
    if (auto it = keyed.find("e"); it != keyed.end()) strategy.exponent = std::stod(it->second);
    if (auto it = keyed.find("exponent"); it != keyed.end()) {
      strategy.exponent = std::stod(it->second);
    }
    if (auto it = keyed.find("margin"); it != keyed.end()) {
      strategy.accept_margin = std::stod(it->second);
    }
    if (auto it = keyed.find("accept_margin"); it != keyed.end()) {
      strategy.accept_margin = std::stod(it->second);
    }
    std::string id = "scripted-" + to_string(strategy.family);
    if (auto it = keyed.find("id"); it != keyed.end()) id = it->second;
    AgentDescriptor descriptor = scripted_descriptor(strategy, id);
    if (auto it = keyed.find("vis"); it != keyed.end()) {
      descriptor.visibility = visibility_from_string(it->second);
    }
    return descriptor;
  }
  if (kind == "lm") {
    LmBackendConfig config = lm_config_from_file(parts[0]);
    std::string id = config.model_id;
    if (auto it = keyed.find("id"); it != keyed.end()) id = it->second;
    auto client = std::make_shared<LmClient>(std::move(config));
    AgentDescriptor descriptor;
    descriptor.id = id;
    descriptor.make_backend = [client, id]() {
      return std::make_shared<LmAgent>(client, id);
    };
    if (auto it = keyed.find("vis"); it != keyed.end()) {
      descriptor.visibility = visibility_from_string(it->second);
    }
    return descriptor;
  }
  throw ConfigError("unknown agent spec kind: '" + kind + "'");
}

namespace {

json metrics_to_json(const RunMetrics& metrics) {
  json out{{"status", to_string(metrics.status)},
           {"soft_agreement", metrics.soft_agreement},
           {"hard_agreement", metrics.hard_agreement},
           {"rounds_used", metrics.rounds_used},
           {"utility", {metrics.utility[0], metrics.utility[1]}},
           {"internal_faithfulness",
            {metrics.internal_faithfulness[0], metrics.internal_faithfulness[1]}}};
  out["utility_on_agreement"] =
      metrics.utility_on_agreement
          ? json{(*metrics.utility_on_agreement)[0], (*metrics.utility_on_agreement)[1]}
          : json(nullptr);
  json external = json::array();
  json note = json::array();
  json msg = json::array();
  json format = json::array();
  for (int agent = 0; agent < 2; ++agent) {
    external.push_back(metrics.external_faithfulness[agent]
                           ? json(*metrics.external_faithfulness[agent])
                           : json(nullptr));
    note.push_back(metrics.instruction[agent].note_instruct);
    msg.push_back(metrics.instruction[agent].message_instruct);
    format.push_back(metrics.instruction[agent].format_instruct);
  }
  out["external_faithfulness"] = external;
  out["note_instruct"] = note;
  out["msg_instruct"] = msg;
  out["format_instruct"] = format;
  if (metrics.agreed_allocation) {
    json agreed = json::object();
    for (const auto& [issue, label] : metrics.agreed_allocation->choices) {
      agreed[issue] = label;
    }
    out["agreed_allocation"] = agreed;
  } else {
    out["agreed_allocation"] = nullptr;
  }
  return out;
}

RunMetrics metrics_from_json(const json& node) {
  RunMetrics metrics;
  const std::string status = node.value("status", "in_progress");
  if (status == "hard_agreement") metrics.status = RunStatus::kHardAgreement;
  else if (status == "no_agreement") metrics.status = RunStatus::kNoAgreement;
  else if (status == "aborted") metrics.status = RunStatus::kAborted;
  metrics.soft_agreement = node.value("soft_agreement", false);
  metrics.hard_agreement = node.value("hard_agreement", false);
  metrics.rounds_used = node.value("rounds_used", 0);
  if (node.contains("utility") && node["utility"].is_array()) {
    metrics.utility = {node["utility"][0].get<double>(), node["utility"][1].get<double>()};
  }
  if (node.contains("utility_on_agreement") && node["utility_on_agreement"].is_array()) {
    metrics.utility_on_agreement = {{node["utility_on_agreement"][0].get<double>(),
                                     node["utility_on_agreement"][1].get<double>()}};
  }
  if (node.contains("internal_faithfulness")) {
    metrics.internal_faithfulness = {node["internal_faithfulness"][0].get<double>(),
                                     node["internal_faithfulness"][1].get<double>()};
  }
  for (int agent = 0; agent < 2; ++agent) {
    if (node.contains("external_faithfulness") &&
        node["external_faithfulness"][agent].is_number()) {
      metrics.external_faithfulness[agent] =
          node["external_faithfulness"][agent].get<double>();
    }
    if (node.contains("note_instruct")) {
      metrics.instruction[agent].note_instruct = node["note_instruct"][agent].get<double>();
      metrics.instruction[agent].message_instruct =
          node["msg_instruct"][agent].get<double>();
      metrics.instruction[agent].format_instruct =
          node["format_instruct"][agent].get<double>();
    }
  }
  if (node.contains("agreed_allocation") && node["agreed_allocation"].is_object()) {
    Allocation agreed;
    for (const auto& [issue, label] : node["agreed_allocation"].items()) {
      agreed.choices[issue] = label.get<std::string>();
    }
    metrics.agreed_allocation = std::move(agreed);
  }
  return metrics;
}

}  // namespace

std::string outcome_to_json_line(const RunOutcome& outcome) {
  json out{{"type", "run"},
           {"schema_version", kTranscriptSchemaVersion},
           {"run_id", outcome.run_id},
           {"game", outcome.game_name},
           {"game_class", to_string(outcome.game_class)},
           {"model_a", outcome.model_a},
           {"model_b", outcome.model_b},
           {"model_a_side", outcome.permutation.model_a_side},
           {"starter_model", outcome.permutation.starter_model},
           {"seed", outcome.seed},
           {"model_by_side", {outcome.model_by_side[0], outcome.model_by_side[1]}},
           {"metrics", metrics_to_json(outcome.metrics)}};
  return out.dump();
}

RunOutcome outcome_from_json_line(const std::string& line) {
  json node = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (node.is_discarded() || !node.is_object()) {
    throw ConfigError("malformed results line: " + line);
  }
  RunOutcome outcome;
  outcome.run_id = node.value("run_id", "");
  outcome.game_name = node.value("game", "");
  outcome.game_class = node.value("game_class", "competitive") == "cooperative"
                           ? GameClass::kCooperative
                           : GameClass::kCompetitive;
  outcome.model_a = node.value("model_a", "");
  outcome.model_b = node.value("model_b", "");
  outcome.permutation.model_a_side = node.value("model_a_side", 0);
  outcome.permutation.starter_model = node.value("starter_model", 0);
  outcome.seed = node.value("seed", std::uint64_t{0});
  if (node.contains("model_by_side") && node["model_by_side"].is_array()) {
    outcome.model_by_side = {node["model_by_side"][0].get<std::string>(),
                             node["model_by_side"][1].get<std::string>()};
  }
  if (node.contains("metrics")) outcome.metrics = metrics_from_json(node["metrics"]);
  return outcome;
}

std::vector<RunOutcome> load_results_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open results file '" + path.string() + "'");
  std::vector<RunOutcome> outcomes;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) outcomes.push_back(outcome_from_json_line(line));
  }
  return outcomes;
}

RunOutcome execute_run(const Game& game, const AgentDescriptor& model_a,
                       const AgentDescriptor& model_b, const Permutation& permutation,
                       std::uint64_t seed, const HarnessOptions& options,
                       std::string run_id) {
  if ((permutation.model_a_side != 0 && permutation.model_a_side != 1) ||
      (permutation.starter_model != 0 && permutation.starter_model != 1)) {
    throw ConfigError("permutation fields must be 0 or 1");
  }
  auto shared_game = std::make_shared<const Game>(game);
  const AgentDescriptor* by_side[2];
  by_side[permutation.model_a_side] = &model_a;
  by_side[1 - permutation.model_a_side] = &model_b;

  std::array<AgentSpec, 2> specs;
  std::array<std::shared_ptr<AgentBackend>, 2> backends;
  for (int side = 0; side < 2; ++side) {
    specs[side].agent_id = by_side[side]->id;
    specs[side].side = side;
    specs[side].persona = by_side[side]->persona;
    specs[side].visibility = by_side[side]->visibility;
    backends[side] = by_side[side]->make_backend();
  }

  ProtocolOptions protocol;
  protocol.max_rounds = options.max_rounds;
  protocol.starter = permutation.starter_side();
  protocol.tom_probing = options.tom_probing;
  protocol.backend_attempts = options.backend_attempts;
  protocol.fallback = options.fallback;
  protocol.seed = seed;

  NegotiationState state =
      run_negotiation(shared_game, specs, backends, options.memory, protocol);
  RunMetrics metrics = compute_run_metrics(state, options.memory);

  RunOutcome outcome;
  outcome.run_id = run_id;
  outcome.game_name = game.name();
  outcome.game_class = classify_game(game);
  outcome.model_a = model_a.id;
  outcome.model_b = model_b.id;
  outcome.permutation = permutation;
  outcome.seed = seed;
  outcome.model_by_side = {specs[0].agent_id, specs[1].agent_id};
  outcome.metrics = metrics;

  if (options.transcript_dir) {
    RunHeader header;
    header.run_id = run_id;
    header.game_name = game.name();
    header.agent_ids = outcome.model_by_side;
    header.starter = protocol.starter;
    header.max_rounds = options.max_rounds;
    header.tom_probing = options.tom_probing;
    header.seed = seed;
    header.memory = options.memory;
    std::filesystem::create_directories(*options.transcript_dir);
    write_transcript_file(*options.transcript_dir / (sanitize_filename(run_id) + ".jsonl"),
                          header, state, metrics);
  }
  return outcome;
}

QualifierReport run_qualifier(const AgentDescriptor& model, const Game& qualifier_game,
                              int runs, const HarnessOptions& options) {
  if (qualifier_game.issue_count() != 1 ||
      qualifier_game.issue(0).type() != IssueType::kDistributive) {
    throw ConfigError("the qualifier game must have a single distributive issue");
  }
  if (runs < 1) throw ConfigError("qualifier needs at least one run");

  const auto permutations = debias_permutations();
  QualifierReport report;
  report.runs = runs;
  for (int i = 0; i < runs; ++i) {
    const Permutation& permutation = permutations[i % 4];
    const std::uint64_t seed = options.base_seed + static_cast<std::uint64_t>(i / 4);
    std::ostringstream run_id;
    run_id << "qualifier__" << model.id << "__s" << (i / 4) << "__" << permutation.label();
    RunOutcome outcome = execute_run(qualifier_game, model, model, permutation, seed,
                                     options, run_id.str());
    if (outcome.metrics.status == RunStatus::kAborted) ++report.aborted;
    if (outcome.metrics.hard_agreement) ++report.hard_agreements;
    report.outcomes.push_back(std::move(outcome));
  }
  report.passed = report.hard_agreements >= 1;
  return report;
}

namespace {

struct RunTask {
  std::string run_id;
  const TournamentGame* game = nullptr;
  const AgentDescriptor* model_a = nullptr;
  const AgentDescriptor* model_b = nullptr;
  Permutation permutation{};
  std::uint64_t seed = 0;
};

}  // namespace

ResultsSet run_tournament(const TournamentConfig& config) {
  if (config.models.empty()) throw SchedulingError("tournament needs at least one model");
  if (config.games.empty()) throw SchedulingError("tournament needs at least one game");
  if (config.runs_per_cell < 1) {
    throw SchedulingError("runs_per_cell must be at least 1");
  }

  if (config.require_qualifier) {
    const Game qualifier_game =
        config.qualifier_game ? *config.qualifier_game : builtin::rental_game();
    for (const AgentDescriptor& model : config.models) {
      QualifierReport report =
          run_qualifier(model, qualifier_game, config.qualifier_runs, config.options);
      if (!report.passed) {
        throw SchedulingError("model '" + model.id +
                              "' failed the qualifier (0 hard agreements in " +
                              std::to_string(report.runs) +
                              " runs); set require_qualifier=false to override");
      }
    }
  }

  // Deterministic schedule: cells (self-play first, then cross pairs in model
  // order) x games x seeds x the 4 debias permutations.
  const auto permutations = debias_permutations();
  std::vector<RunTask> tasks;
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    for (std::size_t j = i; j < config.models.size(); ++j) {
      for (const TournamentGame& game : config.games) {
        for (int seed_index = 0; seed_index < config.runs_per_cell; ++seed_index) {
          for (const Permutation& permutation : permutations) {
            RunTask task;
            task.game = &game;
            task.model_a = &config.models[i];
            task.model_b = &config.models[j];
            task.permutation = permutation;
            task.seed = config.options.base_seed + static_cast<std::uint64_t>(seed_index);
            std::ostringstream run_id;
            run_id << config.models[i].id << "__vs__" << config.models[j].id << "__"
                   << game.name << "__s" << seed_index << "__" << permutation.label();
            task.run_id = run_id.str();
            tasks.push_back(std::move(task));
          }
        }
      }
    }
  }

  std::set<std::string> already_done;
  std::vector<RunOutcome> previous;
  if (config.results_path && std::filesystem::exists(*config.results_path)) {
    previous = load_results_file(*config.results_path);
    for (const RunOutcome& outcome : previous) already_done.insert(outcome.run_id);
  }

  std::vector<std::optional<RunOutcome>> slots(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (already_done.contains(tasks[i].run_id)) {
      auto it = std::find_if(previous.begin(), previous.end(), [&](const RunOutcome& o) {
        return o.run_id == tasks[i].run_id;
      });
      slots[i] = *it;
    }
  }

  std::ofstream results_out;
  if (config.results_path) {
    std::filesystem::create_directories(
        std::filesystem::absolute(*config.results_path).parent_path());
    results_out.open(*config.results_path, std::ios::app);
    if (!results_out) {
      throw Error("cannot open results file '" + config.results_path->string() + "'");
    }
  }

  // Workers pull tasks; the sink flushes finished runs in schedule order so
  // repeated tournaments produce identical bytes.
  std::mutex sink_mutex;
  std::size_t next_flush = 0;
  std::vector<bool> flushed(tasks.size(), false);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (slots[i].has_value()) flushed[i] = true;  // resumed runs are already on disk
  }
  while (next_flush < tasks.size() && slots[next_flush].has_value()) ++next_flush;

  std::atomic<std::size_t> next_task{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const int worker_count =
      config.options.workers > 0
          ? config.options.workers
          : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

  auto worker = [&] {
    while (true) {
      const std::size_t index = next_task.fetch_add(1);
      if (index >= tasks.size()) return;
      if (slots[index].has_value()) continue;  // resumed
      const RunTask& task = tasks[index];
      try {
        RunOutcome outcome =
            execute_run(task.game->game, *task.model_a, *task.model_b, task.permutation,
                        task.seed, config.options, task.run_id);
        std::lock_guard lock(sink_mutex);
        slots[index] = std::move(outcome);
        while (next_flush < tasks.size() && slots[next_flush].has_value()) {
          if (!flushed[next_flush] && results_out.is_open()) {
            results_out << outcome_to_json_line(*slots[next_flush]) << '\n';
            results_out.flush();
          }
          flushed[next_flush] = true;
          ++next_flush;
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(worker_count);
  for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);
  for (std::thread& thread : threads) thread.join();
  if (first_error) std::rethrow_exception(first_error);

  ResultsSet results;
  results.outcomes.reserve(tasks.size());
  for (auto& slot : slots) results.outcomes.push_back(std::move(*slot));
  return results;
}

namespace {

struct Sample {
  const RunOutcome* outcome = nullptr;
  int side = 0;
  std::string model;
};

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

MetricStats stats_of(const std::vector<double>& values) {
  MetricStats stats;
  stats.n = static_cast<int>(values.size());
  if (values.empty()) return stats;
  stats.mean = mean_of(values);
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    const double sample_stddev = std::sqrt(ss / (values.size() - 1));
    stats.std_error = sample_stddev / std::sqrt(static_cast<double>(values.size()));
  }
  return stats;
}

std::string group_value(const Sample& sample, const std::string& key) {
  const RunOutcome& outcome = *sample.outcome;
  if (key == "model") return sample.model;
  if (key == "game") return outcome.game_name;
  if (key == "game_class") return to_string(outcome.game_class);
  if (key == "pair") {
    std::string a = outcome.model_a;
    std::string b = outcome.model_b;
    if (b < a) std::swap(a, b);
    return a + "|" + b;
  }
  if (key == "permutation") return outcome.permutation.label();
  if (key == "side") return std::to_string(sample.side);
  throw Error("unknown group-by key: '" + key + "'");
}

}  // namespace

std::vector<BatchSummary> aggregate(std::span<const RunOutcome> outcomes,
                                    const std::vector<std::string>& group_by,
                                    bool count_aborted_as_failure) {
  std::vector<Sample> samples;
  std::map<std::string, int> aborted_runs;  // per group of the run's samples
  for (const RunOutcome& outcome : outcomes) {
    if (outcome.metrics.status == RunStatus::kAborted && !count_aborted_as_failure) {
      continue;
    }
    for (int side = 0; side < 2; ++side) {
      samples.push_back({&outcome, side, outcome.model_by_side[side]});
    }
  }
  if (samples.empty()) throw Error("no completed runs to aggregate");

  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    if (a.outcome->run_id != b.outcome->run_id) {
      return a.outcome->run_id < b.outcome->run_id;
    }
    return a.side < b.side;
  });

  std::map<std::string, std::vector<const Sample*>> groups;
  std::map<std::string, std::map<std::string, std::string>> group_keys;
  for (const Sample& sample : samples) {
    std::map<std::string, std::string> key;
    for (const std::string& k : group_by) key[k] = group_value(sample, k);
    std::ostringstream flat;
    for (const auto& [k, v] : key) flat << k << "=" << v << ";";
    groups[flat.str()].push_back(&sample);
    group_keys[flat.str()] = std::move(key);
  }

  std::vector<BatchSummary> summaries;
  for (const auto& [flat, members] : groups) {
    BatchSummary summary;
    summary.group = group_keys[flat];
    std::set<std::string> run_ids;
    int soft = 0;
    int hard = 0;
    std::vector<double> u, u_hat, internal, external, note, msg, format, rounds;
    std::map<std::string, std::vector<double>> u_by_perm;
    for (const Sample* sample : members) {
      const RunMetrics& metrics = sample->outcome->metrics;
      run_ids.insert(sample->outcome->run_id);
      if (metrics.status == RunStatus::kAborted) ++summary.aborted;
      if (metrics.soft_agreement) ++soft;
      if (metrics.hard_agreement) ++hard;
      u.push_back(metrics.utility[sample->side]);
      if (metrics.utility_on_agreement) {
        u_hat.push_back((*metrics.utility_on_agreement)[sample->side]);
      }
      internal.push_back(metrics.internal_faithfulness[sample->side]);
      if (metrics.external_faithfulness[sample->side]) {
        external.push_back(*metrics.external_faithfulness[sample->side]);
      }
      note.push_back(metrics.instruction[sample->side].note_instruct);
      msg.push_back(metrics.instruction[sample->side].message_instruct);
      format.push_back(metrics.instruction[sample->side].format_instruct);
      rounds.push_back(static_cast<double>(metrics.rounds_used));
      u_by_perm[sample->outcome->permutation.label()].push_back(
          metrics.utility[sample->side]);
    }
    summary.samples = static_cast<int>(members.size());
    summary.runs = static_cast<int>(run_ids.size());
    summary.soft_rate = static_cast<double>(soft) / members.size();
    summary.hard_rate = static_cast<double>(hard) / members.size();
    summary.utility = stats_of(u);
    summary.utility_on_agreement = stats_of(u_hat);
    summary.internal_faithfulness = stats_of(internal);
    summary.external_faithfulness = stats_of(external);
    summary.note_instruct = stats_of(note);
    summary.message_instruct = stats_of(msg);
    summary.format_instruct = stats_of(format);
    summary.rounds = stats_of(rounds);
    for (const auto& [label, values] : u_by_perm) {
      summary.utility_by_permutation[label] = stats_of(values);
    }
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

namespace {

void append_csv_field(std::ostream& out, const std::string& value, bool first) {
  if (!first) out << ",";
  const bool needs_quotes = value.find_first_of(",\"\n") != std::string::npos;
  if (!needs_quotes) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

}  // namespace

std::string summaries_to_csv(std::span<const BatchSummary> summaries) {
  std::ostringstream out;
  std::vector<std::string> keys;
  if (!summaries.empty()) {
    for (const auto& [k, v] : summaries.front().group) keys.push_back(k);
  }
  bool first = true;
  for (const std::string& k : keys) {
    append_csv_field(out, k, first);
    first = false;
  }
  for (const char* column :
       {"runs", "samples", "aborted", "soft_rate", "hard_rate", "u_mean", "u_se",
        "u_hat_mean", "u_hat_se", "u_hat_n", "internal_faithful_mean",
        "external_faithful_mean", "note_instruct_mean", "msg_instruct_mean",
        "format_instruct_mean", "rounds_mean", "rounds_se"}) {
    append_csv_field(out, column, first);
    first = false;
  }
  out << "\n";
  for (const BatchSummary& summary : summaries) {
    first = true;
    for (const std::string& k : keys) {
      append_csv_field(out, summary.group.at(k), first);
      first = false;
    }
    for (const std::string& value :
         {std::to_string(summary.runs), std::to_string(summary.samples),
          std::to_string(summary.aborted), format_double(summary.soft_rate),
          format_double(summary.hard_rate), format_double(summary.utility.mean),
          format_double(summary.utility.std_error),
          format_double(summary.utility_on_agreement.mean),
          format_double(summary.utility_on_agreement.std_error),
          std::to_string(summary.utility_on_agreement.n),
          format_double(summary.internal_faithfulness.mean),
          format_double(summary.external_faithfulness.mean),
          format_double(summary.note_instruct.mean),
          format_double(summary.message_instruct.mean),
          format_double(summary.format_instruct.mean), format_double(summary.rounds.mean),
          format_double(summary.rounds.std_error)}) {
      append_csv_field(out, value, first);
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

std::string outcomes_to_csv(std::span<const RunOutcome> outcomes) {
  std::ostringstream out;
  out << "run_id,game,game_class,model_a,model_b,model_a_side,starter_model,seed,side,"
         "model,status,soft_agreement,hard_agreement,u,u_hat,internal_faithful,"
         "external_faithful,note_instruct,msg_instruct,format_instruct,rounds\n";
  for (const RunOutcome& outcome : outcomes) {
    for (int side = 0; side < 2; ++side) {
      const RunMetrics& metrics = outcome.metrics;
      bool first = true;
      for (const std::string& value :
           {outcome.run_id, outcome.game_name, to_string(outcome.game_class),
            outcome.model_a, outcome.model_b,
            std::to_string(outcome.permutation.model_a_side),
            std::to_string(outcome.permutation.starter_model),
            std::to_string(outcome.seed), std::to_string(side),
            outcome.model_by_side[side], to_string(metrics.status),
            std::string(metrics.soft_agreement ? "1" : "0"),
            std::string(metrics.hard_agreement ? "1" : "0"),
            format_double(metrics.utility[side]),
            metrics.utility_on_agreement
                ? format_double((*metrics.utility_on_agreement)[side])
                : std::string(),
            format_double(metrics.internal_faithfulness[side]),
            metrics.external_faithfulness[side]
                ? format_double(*metrics.external_faithfulness[side])
                : std::string(),
            format_double(metrics.instruction[side].note_instruct),
            format_double(metrics.instruction[side].message_instruct),
            format_double(metrics.instruction[side].format_instruct),
            std::to_string(metrics.rounds_used)}) {
        append_csv_field(out, value, first);
        first = false;
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace parley
