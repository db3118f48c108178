#include "fixpoint/cli.hpp"

#include "fixpoint/analysis.hpp"
#include "fixpoint/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

namespace fixpoint::cli {

namespace {

namespace fs = std::filesystem;

enum class LogLevel { quiet, info, debug };

LogLevel log_level_from_env()
{
   const char* raw = std::getenv("FIXPOINT_LOG");
   if (!raw) return LogLevel::info;
   const std::string v(raw);
   if (v == "quiet") return LogLevel::quiet;
   if (v == "debug") return LogLevel::debug;
   return LogLevel::info;
}

struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };

/// Flag values; every one of them overrides the corresponding config key.
struct Flags
{
   std::string config_path;
   std::string operator_kind;
   std::string schedule_kind;
   std::vector<std::string> schemes;
   std::vector<double> x0;
   std::optional<std::size_t> max_iters;
   std::optional<double> step_tol;
   std::optional<double> error_tol;
   std::optional<double> epsilon;
   std::optional<std::uint64_t> n;
   std::optional<std::uint64_t> seed;
   std::optional<std::string> out_dir;
   std::optional<std::string> norm;
   std::optional<int> grid;
   std::optional<double> delta;
   std::optional<double> lipschitz_l;
   std::optional<std::size_t> window;
   std::optional<double> threshold;
   std::optional<std::string> mode;
};

struct Context
{
   Json config = Json::object();
   fs::path config_dir = ".";
   Flags flags;
   LogLevel level = LogLevel::info;
   std::ostream* out = nullptr;
   std::ostream* err = nullptr;

   void warn(const std::string& msg) const
   {
      if (level != LogLevel::quiet) *err << "warning: " << msg << '\n';
   }
   void debug(const std::string& msg) const
   {
      if (level == LogLevel::debug) *err << "debug: " << msg << '\n';
   }
};

Json read_json_file(const fs::path& path)
{
   std::ifstream in(path);
   if (!in) throw ConfigError("cannot open '" + path.string() + "'");
   try {
      return Json::parse(in);
   } catch (const Json::exception& e) {
      throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
   }
}

// "halving" / "affine1d" / "affine2d" with default parameters.
Json operator_spec(const Context& ctx)
{
   Json spec;
   if (!ctx.flags.operator_kind.empty()) {
      spec = Json{{"kind", ctx.flags.operator_kind}};
   } else if (ctx.config.contains("operator")) {
      spec = ctx.config.at("operator");
   } else if (ctx.config.contains("operator_file")) {
      spec = read_json_file(ctx.config_dir / ctx.config.at("operator_file").get<std::string>());
   } else {
      spec = Json{{"kind", "halving"}};
   }
   if (ctx.flags.delta) spec["delta"] = *ctx.flags.delta;
   if (ctx.flags.lipschitz_l) spec["L"] = *ctx.flags.lipschitz_l;
   return spec;
}

Operator load_operator(const Context& ctx)
{
   try {
      return operator_from_json(operator_spec(ctx));
   } catch (const LoadError& e) {
      throw ConfigError(e.what());
   }
}

// "example1", "harmonic", "zero" or "constant:<c>".
Schedule load_schedule(const Context& ctx)
{
   Json spec;
   const std::string& flag = ctx.flags.schedule_kind;
   if (!flag.empty()) {
      const auto colon = flag.find(':');
      if (colon == std::string::npos) {
         spec = Json{{"kind", flag}};
      } else {
         double c = 0.0;
         try {
            c = std::stod(flag.substr(colon + 1));
         } catch (const std::exception&) {
            throw ConfigError("bad schedule flag '" + flag + "'");
         }
         spec = Json{{"kind", flag.substr(0, colon)}, {"params", {{"c", c}}}};
      }
   } else if (ctx.config.contains("schedule")) {
      spec = ctx.config.at("schedule");
   } else {
      spec = Json{{"kind", "example1"}};
   }
   try {
      return schedule_from_json(spec);
   } catch (const LoadError& e) {
      throw ConfigError(e.what());
   }
}

template <typename T>
T config_value(const Context& ctx, const std::optional<T>& flag, const char* key, T fallback)
{
   if (flag) return *flag;
   if (!ctx.config.contains(key)) return fallback;
   try {
      return ctx.config.at(key).get<T>();
   } catch (const Json::exception&) {
      throw ConfigError(std::string("config key '") + key + "' has the wrong type");
   }
}

std::vector<Scheme> load_schemes(const Context& ctx, std::vector<Scheme> fallback)
{
   std::vector<std::string> names = ctx.flags.schemes;
   if (names.empty() && ctx.config.contains("schemes")) {
      try {
         names = ctx.config.at("schemes").get<std::vector<std::string>>();
      } catch (const Json::exception&) {
         throw ConfigError("config key 'schemes' must be a list of names");
      }
   }
   if (names.empty()) return fallback;
   std::vector<Scheme> schemes;
   for (const auto& name : names) {
      const auto s = parse_scheme(name);
      if (!s) throw ConfigError("unknown scheme '" + name + "'");
      schemes.push_back(*s);
   }
   return schemes;
}

Vector load_x0(const Context& ctx, const Operator& op)
{
   Vector x0;
   if (!ctx.flags.x0.empty()) {
      x0 = Eigen::Map<const Vector>(ctx.flags.x0.data(), static_cast<Eigen::Index>(ctx.flags.x0.size()));
   } else if (ctx.config.contains("x0")) {
      try {
         x0 = vector_from_json(ctx.config.at("x0"));
      } catch (const LoadError& e) {
         throw ConfigError(std::string("x0: ") + e.what());
      }
   } else {
      x0 = op.domain().upper();
   }
   if (x0.size() != op.domain().dim()) throw ConfigError("x0 dimension does not match the operator");
   if (!op.domain().contains(x0)) throw DomainError("x0 lies outside the operator domain");
   return x0;
}

StopCriteria load_stop(const Context& ctx)
{
   StopCriteria stop;
   if (ctx.config.contains("stop")) {
      const Json& s = ctx.config.at("stop");
      try {
         if (s.contains("max_iters")) stop.max_iters = s.at("max_iters").get<std::size_t>();
         if (s.contains("step_tol")) stop.step_tol = s.at("step_tol").get<double>();
         if (s.contains("error_tol")) stop.error_tol = s.at("error_tol").get<double>();
      } catch (const Json::exception&) {
         throw ConfigError("config key 'stop' is malformed");
      }
   }
   if (ctx.flags.max_iters) stop.max_iters = *ctx.flags.max_iters;
   if (ctx.flags.step_tol) stop.step_tol = *ctx.flags.step_tol;
   if (ctx.flags.error_tol) stop.error_tol = *ctx.flags.error_tol;
   if (stop.max_iters < 1) throw ConfigError("max_iters must be >= 1");
   return stop;
}

Norm load_norm(const Context& ctx)
{
   try {
      return parse_norm(config_value<std::string>(ctx, ctx.flags.norm, "norm", "euclidean"));
   } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
   }
}

fs::path output_dir(const Context& ctx)
{
   std::string dir = ".";
   if (ctx.flags.out_dir) dir = *ctx.flags.out_dir;
   else if (ctx.config.contains("output") && ctx.config.at("output").contains("dir"))
      dir = ctx.config.at("output").at("dir").get<std::string>();
   fs::create_directories(dir);
   return dir;
}

fs::path output_file(const Context& ctx, const char* key, const std::string& default_name)
{
   const fs::path dir = output_dir(ctx);
   if (ctx.config.contains("output") && ctx.config.at("output").contains(key)) {
      fs::path p = ctx.config.at("output").at(key).get<std::string>();
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      return p;
   }
   return dir / default_name;
}

void write_text(const fs::path& path, const std::string& text)
{
   std::ofstream f(path, std::ios::binary);
   if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
   f << text;
}

// ---------------------------------------------------------------------------

int cmd_race(const Context& ctx)
{
   const Operator op = load_operator(ctx);
   const Schedule sched = load_schedule(ctx);
   const auto schemes = load_schemes(ctx, {Scheme::picard_s, Scheme::cr});
   const Vector x0 = load_x0(ctx, op);
   const StopCriteria stop = load_stop(ctx);
   const Norm kind = load_norm(ctx);
   const std::size_t window = config_value<std::size_t>(ctx, ctx.flags.window, "window", 32);
   if (stop.error_tol && !op.fixed_point()) throw ConfigError("error_tol needs a known fixed point");

   const IterateOptions options{false, 0, kind};
   std::vector<std::future<Trajectory>> jobs;
   for (Scheme s : schemes)
      jobs.push_back(std::async(std::launch::async, [&, s] { return iterate(s, op, sched, x0, stop, options); }));
   std::vector<Trajectory> runs;
   for (auto& j : jobs) runs.push_back(j.get());

   Json summary = Json::object();
   for (const auto& t : runs) {
      const std::string name(to_string(t.scheme));
      std::ostringstream csv;
      write_trajectory_csv(csv, t, op.fixed_point(), kind);
      write_text(output_dir(ctx) / (name + ".csv"), csv.str());
      Json entry{{"iterations", t.steps()}, {"stop_reason", std::string(to_string(t.stop_reason))}};
      if (op.fixed_point()) entry["final_error"] = distance(t.last(), *op.fixed_point(), kind);
      summary[name] = entry;
   }

   std::string line = "race: " + std::to_string(runs.size()) + " scheme(s)";
   if (runs.size() >= 2 && op.fixed_point()) {
      std::size_t common = runs.front().iterates.size();
      for (const auto& t : runs) common = std::min(common, t.iterates.size());
      std::vector<ErrorSequence> errors;
      for (const auto& t : runs) {
         ErrorSequence e = error_sequence(t, *op.fixed_point(), kind);
         e.values.resize(common);
         errors.push_back(std::move(e));
      }
      Json pairs = Json::object();
      for (std::size_t i = 0; i < runs.size(); ++i) {
         for (std::size_t j = i + 1; j < runs.size(); ++j) {
            const std::string key = errors[i].scheme + "_vs_" + errors[j].scheme;
            Json verdict;
            try {
               verdict = to_json(rate_compare(errors[i], errors[j], window));
            } catch (const InsufficientData& e) {
               ctx.warn(key + ": " + e.what());
               verdict = Json{{"classification", "inconclusive"}, {"error", e.what()}};
            }
            line += " " + key + "=" + verdict.at("classification").get<std::string>();
            pairs[key] = verdict;
         }
      }
      Json doc{{"operator", op.id()}, {"schedule", sched.id()}, {"window", window},
               {"schemes", summary}, {"pairs", pairs}};
      write_text(output_file(ctx, "json_path", "race.json"), dump_json(doc) + "\n");
   }
   *ctx.out << line << '\n';

   if (stop.error_tol) {
      for (const auto& t : runs) {
         if (t.stop_reason != StopReason::error_tol) {
            *ctx.err << "error: " << to_string(t.scheme) << " did not reach error_tol\n";
            return exit_not_converged;
         }
      }
   }
   return exit_ok;
}

int cmd_verify(const Context& ctx)
{
   const Operator op = load_operator(ctx);
   const Norm kind = load_norm(ctx);
   const int default_grid = op.domain().dim() == 1 ? 101 : op.domain().dim() == 2 ? 41 : 11;
   const int grid = config_value<int>(ctx, ctx.flags.grid, "grid", default_grid);
   if (grid < 2) throw ConfigError("grid must be >= 2");
   ConditionReport report;
   try {
      report = verify_weak_contraction(op, grid, kind);
   } catch (const DimensionError& e) {
      throw ConfigError(e.what());
   }
   write_text(output_file(ctx, "json_path", "verify.json"), dump_json(to_json(report)) + "\n");
   *ctx.out << "verify: " << op.id() << (report.pass ? " pass" : " fail")
            << " max_violation=" << format_real(report.max_violation) << '\n';
   return report.pass ? exit_ok : exit_check_failed;
}

int cmd_bounds(const Context& ctx)
{
   const Operator op = load_operator(ctx);
   const Schedule sched = load_schedule(ctx);
   const Vector x0 = load_x0(ctx, op);
   const Norm kind = load_norm(ctx);
   const Index n = config_value<std::uint64_t>(ctx, ctx.flags.n, "n", 300);
   if (n < 1) throw ConfigError("n must be >= 1");
   if (!op.fixed_point()) throw ConfigError("bounds needs an operator with a known fixed point");
   const Vector& u = *op.fixed_point();

   StopCriteria stop;
   stop.max_iters = n;
   const Trajectory traj = iterate(Scheme::picard_s, op, sched, x0, stop, {false, 0, kind});
   const double err0 = distance(x0, u, kind);
   const auto bounds = theorem1_bound_sequence(op.delta(), sched, err0, n);

   std::ostringstream csv;
   csv << "n,err,bound,ok\n";
   bool all_ok = true;
   bool warned = false;
   for (std::size_t m = 0; m < traj.iterates.size(); ++m) {
      const double err = distance(traj.iterates[m], u, kind);
      const LogProduct& b = bounds[m];
      if (b.underflow && !warned) {
         ctx.warn("bound underflows at n=" + std::to_string(m) + "; log-domain value " +
                  format_real(b.log_abs));
         warned = true;
      }
      const bool ok = err <= b.value + 1e-12;
      all_ok = all_ok && ok;
      csv << m << ',' << format_real(err) << ',' << format_real(b.value) << ',' << (ok ? "true" : "false")
          << '\n';
   }
   write_text(output_file(ctx, "csv_path", "bounds.csv"), csv.str());
   *ctx.out << "bounds: " << op.id() << " n=" << n << (all_ok ? " all ok" : " VIOLATED") << '\n';
   return all_ok ? exit_ok : exit_check_failed;
}

int cmd_depend(const Context& ctx)
{
   const double eps = config_value<double>(ctx, ctx.flags.epsilon, "epsilon", 0.001);
   if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
   const Operator op = load_operator(ctx);
   if (!op.fixed_point()) throw ConfigError("depend needs an operator with a known fixed point");
   const Schedule sched = load_schedule(ctx);
   const Vector x0 = load_x0(ctx, op);
   const StopCriteria stop = load_stop(ctx);
   const Norm kind = load_norm(ctx);
   const std::string mode_name = config_value<std::string>(ctx, ctx.flags.mode, "mode", "constant_offset");
   PerturbMode mode;
   if (mode_name == "constant_offset") mode = PerturbMode::constant_offset;
   else if (mode_name == "uniform_random") mode = PerturbMode::uniform_random;
   else if (mode_name == "zero_offset") mode = PerturbMode::zero_offset;
   else throw ConfigError("unknown perturbation mode '" + mode_name + "'");
   const auto seed = config_value<std::uint64_t>(ctx, ctx.flags.seed, "seed", 0);

   const DependenceReport report =
      data_dependence_experiment(op, eps, sched, x0, stop, mode, kind, seed);
   if (!report.hypothesis_ok)
      ctx.warn("schedule '" + sched.id() + "' violates a_n^1 a_n^2 >= 1/2; bound is not guaranteed");
   write_text(output_file(ctx, "json_path", "depend.json"), dump_json(to_json(report)) + "\n");
   *ctx.out << "depend: " << op.id() << " distance=" << format_real(report.distance)
            << " bound=" << format_real(report.bound) << (report.pass ? " pass" : " FAIL") << '\n';
   return exit_ok;
}

int cmd_audit(const Context& ctx)
{
   const Schedule sched = load_schedule(ctx);
   const Index n = config_value<std::uint64_t>(ctx, ctx.flags.n, "n", 10000);
   const double delta = config_value<double>(ctx, ctx.flags.delta, "delta", 0.5);
   const double threshold = config_value<double>(ctx, ctx.flags.threshold, "threshold", 50.0);
   if (n < 1) throw ConfigError("n must be >= 1");
   if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
   if (!(threshold > 0.0)) throw ConfigError("threshold must be positive");

   const ScheduleAudit audit = audit_schedule(sched, delta, n, threshold);
   write_text(output_file(ctx, "json_path", "audit.json"), dump_json(to_json(audit)) + "\n");
   *ctx.out << "audit: " << sched.id() << " theorem1_evidence=" << audit.theorem1.evidence
            << " theorem3=" << audit.theorem3.pass << " theorem4=" << audit.theorem4.pass << '\n';
   return exit_ok;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
   CLI::App app{"Fixed-point iteration races, bound checks and audits", "fixpoint-race"};
   app.require_subcommand(1);
   Context ctx;
   ctx.out = &out;
   ctx.err = &err;
   ctx.level = log_level_from_env();
   Flags& f = ctx.flags;

   auto add_common = [&f](CLI::App* sub) {
      sub->add_option("--config", f.config_path, "JSON experiment file");
      sub->add_option("--operator", f.operator_kind, "halving | affine1d | affine2d");
      sub->add_option("--schedule", f.schedule_kind, "example1 | harmonic | zero | constant:<c>");
      sub->add_option("--scheme", f.schemes, "scheme name (repeatable)");
      sub->add_option("--x0", f.x0, "start point, comma separated")->delimiter(',');
      sub->add_option("--max-iters", f.max_iters);
      sub->add_option("--step-tol", f.step_tol);
      sub->add_option("--error-tol", f.error_tol);
      sub->add_option("--eps", f.epsilon, "perturbation size");
      sub->add_option("--n", f.n, "horizon for audit/bounds");
      sub->add_option("--seed", f.seed);
      sub->add_option("--out", f.out_dir, "output directory");
      sub->add_option("--norm", f.norm, "euclidean | max");
      sub->add_option("--grid", f.grid, "grid points per dimension (verify)");
      sub->add_option("--delta", f.delta, "declared delta override");
      sub->add_option("--L", f.lipschitz_l, "declared L override");
      sub->add_option("--window", f.window, "rate comparison window");
      sub->add_option("--threshold", f.threshold, "divergence evidence threshold (audit)");
      sub->add_option("--mode", f.mode, "constant_offset | uniform_random | zero_offset");
   };

   std::map<std::string, int (*)(const Context&)> commands{
      {"race", cmd_race}, {"verify", cmd_verify}, {"bounds", cmd_bounds},
      {"depend", cmd_depend}, {"audit", cmd_audit}};
   for (const auto& [name, fn] : commands) add_common(app.add_subcommand(name));

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? exit_ok : exit_config_error;
   }

   try {
      if (!f.config_path.empty()) {
         ctx.config = read_json_file(f.config_path);
         if (!ctx.config.is_object()) throw ConfigError("config must be a JSON object");
         ctx.config_dir = fs::path(f.config_path).parent_path();
         if (ctx.config_dir.empty()) ctx.config_dir = ".";
      }
      for (const auto& [name, fn] : commands) {
         if (app.got_subcommand(name)) {
            ctx.debug("running " + name);
            return fn(ctx);
         }
      }
   } catch (const ConfigError& e) {
      err << "error: " << e.what() << '\n';
      return exit_config_error;
   } catch (const DomainError& e) {
      err << "error: " << e.what() << '\n';
      return exit_domain_error;
   } catch (const NotConverged& e) {
      err << "error: " << e.what() << '\n';
      return exit_not_converged;
   } catch (const RangeError& e) {
      err << "error: " << e.what() << '\n';
      return exit_config_error;
   } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return exit_config_error;
   }
   return exit_config_error;
}

} // namespace fixpoint::cli
