#include "scos/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "scos/errors.hpp"

namespace scos {

namespace fs = std::filesystem;

std::string PolicySpec::name() const {
  static const char* names[] = {"ts-greedy",   "ts-eps",       "ts-softmax", "ts-drl",
                                "ro-optimism", "ro-hindsight", "penalty-rd", "penalty-dt"};
  std::string n = names[static_cast<int>(id)];
  if (belief == CorrelationMode::kMarginal) n += ":marginal";
  return n;
}

bool PolicySpec::trained() const { return static_cast<int>(id) <= static_cast<int>(PolicyId::kTsDrl); }

PolicySpec PolicySpec::parse(const std::string& s) {
  PolicySpec p;
  std::string base = s;
  if (auto pos = s.find(':'); pos != std::string::npos) {
    base = s.substr(0, pos);
    std::string mode = s.substr(pos + 1);
    if (mode == "marginal") p.belief = CorrelationMode::kMarginal;
    else if (mode != "full") throw Error(ErrorCode::kConfig, "unknown belief mode '" + mode + "'");
  }
  static const std::map<std::string, PolicyId> ids = {
      {"ts-greedy", PolicyId::kTsGreedy},     {"ts-eps", PolicyId::kTsEps},
      {"ts-softmax", PolicyId::kTsSoftmax},   {"ts-drl", PolicyId::kTsDrl},
      {"ro-optimism", PolicyId::kRoOptimism}, {"ro-hindsight", PolicyId::kRoHindsight},
      {"penalty-rd", PolicyId::kPenaltyRd},   {"penalty-dt", PolicyId::kPenaltyDt}};
  auto it = ids.find(base);
  if (it == ids.end()) throw Error(ErrorCode::kConfig, "unknown policy '" + base + "'");
  p.id = it->second;
  return p;
}

std::vector<PolicySpec> all_policies() {
  std::vector<PolicySpec> out;
  for (int k = 0; k <= static_cast<int>(PolicyId::kPenaltyDt); ++k) out.push_back({static_cast<PolicyId>(k)});
  return out;
}

nlohmann::json HarnessConfig::to_json() const {
  return {{"eta", opi.eta},
          {"max_iterations", opi.max_iterations},
          {"epsilon0", opi.epsilon0},
          {"epsilon_decay", opi.epsilon_decay},
          {"beta", opi.beta},
          {"gamma_scale", opi.gamma_scale},
          {"use_bonus", opi.use_bonus},
          {"window", opi.window},
          {"min_visits", opi.min_visits},
          {"truncation_factor", opi.truncation_factor},
          {"delta", delta},
          {"rollout_samples", rollout.samples},
          {"step_cap_factor", episode.step_cap_factor},
          {"seed", seed},
          {"workers", workers}};
}

HarnessConfig HarnessConfig::from_json(const nlohmann::json& j) {
  HarnessConfig c;
  c.opi.eta = j.value("eta", c.opi.eta);
  c.opi.max_iterations = j.value("max_iterations", c.opi.max_iterations);
  c.opi.epsilon0 = j.value("epsilon0", c.opi.epsilon0);
  c.opi.epsilon_decay = j.value("epsilon_decay", c.opi.epsilon_decay);
  c.opi.beta = j.value("beta", c.opi.beta);
  c.opi.gamma_scale = j.value("gamma_scale", c.opi.gamma_scale);
  c.opi.use_bonus = j.value("use_bonus", c.opi.use_bonus);
  c.opi.window = j.value("window", c.opi.window);
  c.opi.min_visits = j.value("min_visits", c.opi.min_visits);
  c.opi.truncation_factor = j.value("truncation_factor", c.opi.truncation_factor);
  c.delta = j.value("delta", c.delta);
  c.rollout.samples = j.value("rollout_samples", c.rollout.samples);
  c.episode.step_cap_factor = j.value("step_cap_factor", c.episode.step_cap_factor);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.rollout.gamma_scale = c.opi.gamma_scale;
  c.rollout.use_bonus = c.opi.use_bonus;
  c.rollout.step_cap_factor = c.episode.step_cap_factor;
  c.opi.validate();
  c.rollout.validate();
  if (!(c.delta > 0)) throw Error(ErrorCode::kConfig, "delta must be > 0");
  if (c.workers < 1) throw Error(ErrorCode::kConfig, "workers must be >= 1");
  return c;
}

nlohmann::json TrainedModel::to_json() const {
  return {{"base", base.to_json()}, {"log", log.to_json()}};
}

Instance::Instance(const ScenarioSpec& s, const Environment& e)
    : spec(&s),
      env(&e),
      world(make_world(s, e.obstacles)),
      sensor(s.lambda, s.sensor_range),
      ctx(PlanningContext::make(world, s.sensor_range, sensor.noise_variance())) {
  ctx.world = &world;
}

std::uint64_t setting_hash(const ScenarioSpec& spec) {
  return fnv1a(spec.setting_id() + "/" + std::to_string(spec.seed));
}

TrainedModel train_policy(const PolicySpec& policy, const Instance& inst, const HarnessConfig& cfg) {
  TrainedModel m;
  BeliefState prior = make_prior(*inst.spec, inst.env->obstacles, policy.belief);
  Rng rng = make_rng(cfg.seed, {kStreamTraining, setting_hash(*inst.spec),
                                std::uint64_t(inst.env->index), std::uint64_t(policy.id),
                                std::uint64_t(policy.belief)});
  const int root = inst.world.start();
  switch (policy.id) {
    case PolicyId::kTsGreedy:
    case PolicyId::kTsEps:
    case PolicyId::kTsSoftmax: {
      OpiConfig opi = cfg.opi;
      opi.exploration = policy.id == PolicyId::kTsGreedy ? Exploration::kGreedy
                        : policy.id == PolicyId::kTsEps  ? Exploration::kEpsilonGreedy
                                                         : Exploration::kSoftmax;
      auto t = opi_train(inst.ctx, prior, root, opi, rng);
      m.base = BaseModel(std::move(t.table));
      m.log = t.log;
      break;
    }
    case PolicyId::kTsDrl: {
      DrlConfig drl{cfg.opi, cfg.delta, true};
      auto t = drl_train(inst.ctx, prior, root, drl, rng);
      m.base = BaseModel(std::move(t.table));
      m.log = t.log;
      break;
    }
    default:
      break;
  }
  return m;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& policy, const TrainedModel* model,
                                    const HarnessConfig& cfg) {
  RolloutConfig rc = cfg.rollout;
  rc.gamma_scale = cfg.opi.gamma_scale;
  rc.use_bonus = cfg.opi.use_bonus;
  rc.step_cap_factor = cfg.episode.step_cap_factor;
  switch (policy.id) {
    case PolicyId::kRoOptimism: return std::make_unique<OptimisticRolloutPolicy>(rc);
    case PolicyId::kRoHindsight: return std::make_unique<HindsightRolloutPolicy>(rc);
    case PolicyId::kPenaltyRd: return std::make_unique<PenaltyPolicy>(PenaltyVariant::kRD);
    case PolicyId::kPenaltyDt: return std::make_unique<PenaltyPolicy>(PenaltyVariant::kDT);
    default:
      if (!model) throw Error(ErrorCode::kConfig, policy.name() + " needs a trained base model");
      return std::make_unique<TwoStagePolicy>(policy.name(), model->base, rc);
  }
}

double optimal_oracle(const LatticeWorld& world, const Statuses& truth) {
  std::vector<Label> labels(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) labels[i] = truth[i] ? Label::kBlocked : Label::kFree;
  auto d = cost_to_go(world, labels, {}, world.goal(), world.start());
  if (!std::isfinite(d[world.start()]))
    throw Error(ErrorCode::kUnreachable, "instance has no feasible path");
  return d[world.start()];
}

RunResult run_cell(const Instance& inst, const PolicySpec& policy, int rep,
                   const TrainedModel* model, const HarnessConfig& cfg, EpisodeTrace* trace_out,
                   std::string* jsonl) {
  const ScenarioSpec& spec = *inst.spec;
  const Statuses& truth = inst.env->replicates.at(rep);
  RunResult r;
  r.policy = policy.name();
  r.setting = spec.setting_id();
  r.lambda = spec.lambda;
  r.range = spec.sensor_range;
  r.obstacles = spec.obstacles;
  r.grid = std::to_string(spec.width) + "x" + std::to_string(spec.height);
  r.env = inst.env->index;
  r.rep = rep;
  r.oracle = optimal_oracle(inst.world, truth);

  auto pol = make_policy(policy, model, cfg);
  BeliefState prior = make_prior(spec, inst.env->obstacles, policy.belief);
  // Same stream for every policy so sensor noise starts paired.
  Rng rng = make_rng(cfg.seed, {kStreamEpisode, setting_hash(spec), std::uint64_t(r.env),
                                std::uint64_t(rep)});
  EpisodeTrace trace = execute_episode(inst.ctx, inst.sensor, truth, prior, *pol, cfg.episode, rng);
  trace.offline_seconds = model ? model->log.seconds : 0.0;
  r.failed = trace.failed;
  r.cost = trace.total_cost;
  r.gap = r.failed ? 0.0 : r.cost - r.oracle;
  r.steps = static_cast<int>(trace.steps.size());
  r.online_seconds = trace.online_seconds;
  r.offline_seconds = trace.offline_seconds;
  nlohmann::json extra = {{"setting", r.setting}, {"lambda", r.lambda},   {"range", r.range},
                          {"n", r.obstacles},     {"grid", r.grid},       {"env", r.env},
                          {"replicate", r.rep},   {"seed", cfg.seed},     {"oracle_cost", r.oracle},
                          {"gap", r.gap}};
  if (model) extra["training"] = {{"iterations", model->log.iterations},
                                  {"converged", model->log.converged},
                                  {"truncated", model->log.truncated}};
  std::string text = trace.jsonl(extra);
  r.digest = fnv1a(text);
  if (jsonl) *jsonl = std::move(text);
  if (trace_out) *trace_out = std::move(trace);
  return r;
}

namespace {

template <class F>
void parallel_for(int n, int workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string safe_name(std::string s) {
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

}  // namespace

std::vector<RunResult> run_matrix(const std::vector<ScenarioSet>& sets,
                                  const std::vector<PolicySpec>& policies, const HarnessConfig& cfg,
                                  const std::string& out_dir, bool verbose) {
  struct EnvSlot {
    const ScenarioSet* set;
    std::unique_ptr<Instance> inst;
  };
  std::vector<EnvSlot> envs;
  for (const auto& s : sets)
    for (const auto& e : s.environments) envs.push_back({&s, std::make_unique<Instance>(s.spec, e)});

  // Offline stage: one model per (trained policy, environment).
  struct TrainJob {
    std::size_t env;
    std::size_t policy;
  };
  std::vector<TrainJob> train_jobs;
  for (std::size_t e = 0; e < envs.size(); ++e)
    for (std::size_t p = 0; p < policies.size(); ++p)
      if (policies[p].trained()) train_jobs.push_back({e, p});
  std::vector<std::unique_ptr<TrainedModel>> models(envs.size() * policies.size());
  std::mutex log_mu;
  parallel_for(static_cast<int>(train_jobs.size()), cfg.workers, [&](int i) {
    const auto& job = train_jobs[i];
    auto m = std::make_unique<TrainedModel>(train_policy(policies[job.policy], *envs[job.env].inst, cfg));
    if (verbose) {
      std::lock_guard lock(log_mu);
      fprintf(stderr, "trained %s env %zu: %d iterations, converged=%d, %.2fs\n",
              policies[job.policy].name().c_str(), job.env, m->log.iterations, m->log.converged,
              m->log.seconds);
    }
    models[job.env * policies.size() + job.policy] = std::move(m);
  });

  struct CellJob {
    std::size_t env;
    std::size_t policy;
    int rep;
  };
  std::vector<CellJob> cells;
  for (std::size_t e = 0; e < envs.size(); ++e)
    for (std::size_t p = 0; p < policies.size(); ++p)
      for (int r = 0; r < envs[e].set->spec.replicates; ++r) cells.push_back({e, p, r});

  std::vector<RunResult> runs(cells.size());
  if (!out_dir.empty()) fs::create_directories(out_dir);
  parallel_for(static_cast<int>(cells.size()), cfg.workers, [&](int i) {
    const auto& c = cells[i];
    const TrainedModel* model = models[c.env * policies.size() + c.policy].get();
    std::string text;
    RunResult r = run_cell(*envs[c.env].inst, policies[c.policy], c.rep, model, cfg, nullptr, &text);
    if (!out_dir.empty()) {
      fs::path dir = fs::path(out_dir) / "traces" / r.setting / safe_name(r.policy);
      fs::create_directories(dir);
      std::ofstream(dir / ("e" + std::to_string(r.env) + "_r" + std::to_string(r.rep) + ".jsonl")) << text;
    }
    if (verbose) {
      std::lock_guard lock(log_mu);
      fprintf(stderr, "%s %s e%d r%d cost %.3f oracle %.3f%s (%.2fs)\n", r.setting.c_str(),
              r.policy.c_str(), r.env, r.rep, r.cost, r.oracle, r.failed ? " FAILED" : "",
              r.online_seconds);
    }
    runs[i] = std::move(r);
  });

  if (!out_dir.empty()) {
    std::ofstream t(fs::path(out_dir) / "timing.csv");
    t << "policy,setting,env,replicate,online_seconds,offline_seconds,digest\n";
    for (const auto& r : runs)
      t << r.policy << ',' << r.setting << ',' << r.env << ',' << r.rep << ',' << r.online_seconds
        << ',' << r.offline_seconds << ',' << std::hex << r.digest << std::dec << '\n';
    write_report(aggregate(runs), (fs::path(out_dir) / "report.csv").string());
    write_runs(runs, (fs::path(out_dir) / "runs.csv").string());
  }
  return runs;
}

Summary summarize(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::kEmptySet, "nothing to summarise");
  Summary s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / v.size();
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (n > 1) {
    double m2 = 0.0;
    for (double x : v) m2 += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(m2 / (n - 1));
  }
  return s;
}

std::vector<MetricRow> aggregate(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw Error(ErrorCode::kEmptySet, "no runs to aggregate");
  std::map<std::pair<std::string, std::string>, std::vector<const RunResult*>> groups;
  for (const auto& r : runs) groups[{r.setting, r.policy}].push_back(&r);

  std::vector<MetricRow> rows;
  for (const auto& [key, members] : groups) {
    const RunResult& f = *members.front();
    auto row = [&](const std::string& metric, double value, double ci) {
      rows.push_back({f.policy, f.setting, f.lambda, f.range, f.obstacles, f.grid, metric, value, ci});
    };
    std::vector<double> cost, gap, online, offline;
    std::map<int, std::vector<double>> by_env_cost, by_env_gap;
    int failures = 0;
    for (const RunResult* r : members) {
      online.push_back(r->online_seconds);
      offline.push_back(r->offline_seconds);
      if (r->failed) {
        ++failures;
        continue;
      }
      cost.push_back(r->cost);
      gap.push_back(r->gap);
      by_env_cost[r->env].push_back(r->cost);
      by_env_gap[r->env].push_back(r->gap);
    }
    row("runs", static_cast<double>(members.size()), 0.0);
    row("failures", failures, 0.0);
    if (!cost.empty()) {
      std::vector<double> env_cost, env_gap, within;
      for (auto& [e, v] : by_env_cost) {
        Summary s = summarize(v);
        env_cost.push_back(s.mean);
        within.push_back(s.sd);
      }
      for (auto& [e, v] : by_env_gap) env_gap.push_back(summarize(v).mean);
      Summary sc = summarize(cost), sg = summarize(gap);
      Summary ec = summarize(env_cost), eg = summarize(env_gap);
      const double root_e = std::sqrt(static_cast<double>(env_cost.size()));
      row("mean_cost", sc.mean, 1.96 * ec.sd / root_e);
      row("median_cost", sc.median, 0.0);
      row("mean_gap", sg.mean, 1.96 * eg.sd / root_e);
      row("within_env_sd", summarize(within).mean, 0.0);
      row("cross_env_sd", ec.sd, 0.0);
    }
    row("online_seconds", summarize(online).mean, 0.0);
    row("offline_seconds", summarize(offline).mean, 0.0);
  }
  return rows;
}

PairedDifference paired_difference(const std::vector<RunResult>& runs, const std::string& a,
                                   const std::string& setting_a, const std::string& b,
                                   const std::string& setting_b) {
  std::map<std::pair<int, int>, double> ca, cb;
  for (const auto& r : runs) {
    if (r.failed) continue;
    if (r.policy == a && r.setting == setting_a) ca[{r.env, r.rep}] = r.cost;
    if (r.policy == b && r.setting == setting_b) cb[{r.env, r.rep}] = r.cost;
  }
  std::map<int, std::vector<double>> by_env;
  PairedDifference out;
  for (const auto& [k, va] : ca) {
    auto it = cb.find(k);
    if (it == cb.end()) continue;
    by_env[k.first].push_back(it->second - va);
    ++out.pairs;
  }
  if (by_env.empty()) return out;
  std::vector<double> env_means;
  for (auto& [e, v] : by_env) env_means.push_back(summarize(v).mean);
  Summary s = summarize(env_means);
  out.mean = s.mean;
  out.ci95 = 1.96 * s.sd / std::sqrt(static_cast<double>(env_means.size()));
  return out;
}

void write_report(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path);
  out.precision(10);
  out << "policy,setting_id,lambda,R,N,grid,metric,value,ci95\n";
  for (const auto& r : rows)
    out << r.policy << ',' << r.setting << ',' << r.lambda << ',' << r.range << ',' << r.obstacles
        << ',' << r.grid << ',' << r.metric << ',' << r.value << ',' << r.ci95 << '\n';
}

void write_runs(const std::vector<RunResult>& runs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path);
  out.precision(10);
  out << "policy,setting_id,lambda,R,N,grid,env,replicate,cost,oracle,gap,failed,steps,online_seconds,offline_seconds\n";
  for (const auto& r : runs)
    out << r.policy << ',' << r.setting << ',' << r.lambda << ',' << r.range << ',' << r.obstacles
        << ',' << r.grid << ',' << r.env << ',' << r.rep << ',' << r.cost << ',' << r.oracle << ','
        << r.gap << ',' << (r.failed ? 1 : 0) << ',' << r.steps << ',' << r.online_seconds << ','
        << r.offline_seconds << '\n';
}

std::vector<RunResult> load_runs(const std::string& dir) {
  std::map<std::string, std::pair<double, double>> timing;
  {
    std::ifstream t(fs::path(dir) / "timing.csv");
    std::string line;
    std::getline(t, line);
    while (std::getline(t, line)) {
      std::stringstream ss(line);
      std::string policy, setting, env, rep, on, off;
      std::getline(ss, policy, ',');
      std::getline(ss, setting, ',');
      std::getline(ss, env, ',');
      std::getline(ss, rep, ',');
      std::getline(ss, on, ',');
      std::getline(ss, off, ',');
      timing[policy + "|" + setting + "|" + env + "|" + rep] = {std::stod(on), std::stod(off)};
    }
  }
  std::vector<RunResult> runs;
  const fs::path root = fs::path(dir) / "traces";
  if (!fs::exists(root)) throw Error(ErrorCode::kEmptySet, "no traces under " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    auto end = text.find_last_not_of('\n');
    auto start = text.rfind('\n', end);
    auto s = nlohmann::json::parse(text.substr(start == std::string::npos ? 0 : start + 1));
    RunResult r;
    r.policy = s.at("policy");
    r.setting = s.at("setting");
    r.lambda = s.at("lambda");
    r.range = s.at("range");
    r.obstacles = s.at("n");
    r.grid = s.at("grid");
    r.env = s.at("env");
    r.rep = s.at("replicate");
    r.cost = s.at("total_cost");
    r.oracle = s.at("oracle_cost");
    r.gap = s.at("gap");
    r.failed = s.at("failed");
    r.steps = s.at("steps");
    r.digest = fnv1a(text);
    auto key = r.policy + "|" + r.setting + "|" + std::to_string(r.env) + "|" + std::to_string(r.rep);
    if (auto it = timing.find(key); it != timing.end()) {
      r.online_seconds = it->second.first;
      r.offline_seconds = it->second.second;
    }
    runs.push_back(std::move(r));
  }
  return runs;
}

}  // namespace scos
