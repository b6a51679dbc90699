#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "alcsheaf/wallcross.hpp"
#include "json.hpp"
#include "suites.hpp"

using namespace alcsheaf;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr const char* kCacheEnv = "ALCSHEAF_CACHE_DIR";

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct JobConfig {
  std::string type = "A1";
  int rank = 0;
  int characteristic = 0;
  std::string weight;
  int window = 1;
  std::string format = "text";
  int degree_cap = -1;
  bool trace = false;
  std::string suite = "all";
  std::string alcove;
  std::vector<std::string> compare, interval;
  std::string ideal;
  bool list = false;
};

void add_common(CLI::App* app, JobConfig& c) {
  app->add_option("--type", c.type, "root system, e.g. A2, or a letter together with --rank");
  app->add_option("--rank", c.rank, "rank when --type is a single letter");
  app->add_option("--char", c.characteristic, "characteristic of the coefficient field (0 or a prime)");
  app->add_option("--weight", c.weight, "weight lambda in fundamental-weight coordinates, comma separated");
  app->add_option("--window", c.window, "window radius in root-lattice units")->check(CLI::NonNegativeNumber);
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app->add_option("--degree-cap", c.degree_cap, "starting degree cap for kernel computations")
      ->check(CLI::NonNegativeNumber);
}

RootSystem root_system(const JobConfig& c) {
  std::string label = c.type;
  if (c.rank > 0) {
    if (label.size() != 1) throw UsageError("--rank needs a single-letter --type");
    label += std::to_string(c.rank);
  }
  try {
    return make_root_system(label);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; static_cast<long>(d) * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void validate_char(const JobConfig& c) {
  if (c.characteristic != 0 && !is_prime(c.characteristic))
    throw UsageError("--char must be 0 or a prime");
}

Weight parse_weight(const AlcoveGeometry& g, const std::string& text) {
  if (text.empty()) return Weight(g.rank(), 0);
  Weight w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse weight '" + text + "'");
    }
  }
  if (static_cast<int>(w.size()) != g.rank()) throw UsageError("weight needs " + std::to_string(g.rank()) + " entries");
  return w;
}

Alcove parse_alcove(const AlcoveGeometry& g, const std::string& text) {
  try {
    return g.parse(text);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::string cache_path(const std::string& key) {
  const char* dir = std::getenv(kCacheEnv);
  if (!dir || !*dir) return {};
  std::string name;
  for (char ch : key) name += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return (std::filesystem::path(dir) / (name + ".json")).string();
}

std::string window_json(const AlcoveGeometry& g, const Alcove& center, int radius) {
  std::string path = cache_path("window-" + g.roots().label() + "-" + g.format(center) + "-r" + std::to_string(radius));
  if (!path.empty()) {
    std::ifstream in(path);
    if (in) return std::string(std::istreambuf_iterator<char>(in), {});
  }
  std::string text = Window::around(g, center, radius).dump_json();
  if (!path.empty()) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream(path) << text;
  }
  return text;
}

void print_alcoves(const AlcoveGeometry& g, const std::vector<Alcove>& xs, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& a : xs) j.push_back({{"id", g.format(a)}, {"coords", g.format_coords(a)}});
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "alcove,coordinates\n";
    for (const auto& a : xs) std::cout << '"' << g.format(a) << "\",\"" << g.format_coords(a) << "\"\n";
  } else {
    std::cout << xs.size() << " alcoves\n";
    for (const auto& a : xs) std::cout << g.format(a) << "  " << g.format_coords(a) << "\n";
  }
}

int cmd_order(const JobConfig& c) {
  AlcoveGeometry g(root_system(c));
  Weight lambda = parse_weight(g, c.weight);
  bool did = false;
  if (!c.compare.empty()) {
    Order o = g.compare(parse_alcove(g, c.compare[0]), parse_alcove(g, c.compare[1]));
    if (c.format == "json")
      std::cout << nlohmann::ordered_json{{"order", to_string(o)}}.dump() << "\n";
    else
      std::cout << to_string(o) << "\n";
    did = true;
  }
  if (!c.interval.empty()) {
    Alcove a = parse_alcove(g, c.interval[0]), b = parse_alcove(g, c.interval[1]);
    if (!g.leq(a, b)) throw UsageError("interval endpoints are not ordered");
    print_alcoves(g, g.interval(a, b), c.format);
    did = true;
  }
  if (!c.ideal.empty()) {
    Alcove a = parse_alcove(g, c.ideal);
    Window w = Window::around(g, a, c.window);
    std::vector<Alcove> below;
    for (const auto& x : w.alcoves())
      if (g.leq(x, a)) below.push_back(x);
    print_alcoves(g, below, c.format);
    did = true;
  }
  if (c.list || !did) {
    Alcove center = c.alcove.empty() ? g.special_minus(lambda) : parse_alcove(g, c.alcove);
    std::cout << window_json(g, center, c.window) << "\n";
  }
  return kOk;
}

std::string table_text(const AlcoveGeometry& g, const VermaTable& t) {
  std::ostringstream os;
  for (const auto& [a, r] : t) os << g.format(a) << "  " << g.format_coords(a) << "  " << r.str() << "\n";
  return os.str();
}

int cmd_projective(const JobConfig& c) {
  AlcoveGeometry g(root_system(c));
  validate_char(c);
  if (!gkm_check(g.roots(), c.characteristic)) throw UsageError("the GKM condition fails for this characteristic");
  if (c.alcove.empty()) throw UsageError("--alcove is required");
  Alcove a = parse_alcove(g, c.alcove);
  ProjectiveOptions options;
  if (!c.weight.empty()) options.lambda = parse_weight(g, c.weight);
  options.trace = c.trace;
  ProjectiveReport rep = with_field(c.characteristic, [&]<class K>() {
    return build_projective<K>(g, a, options).report;
  });
  const int window = std::max(c.window, rep.window_radius);
  if (c.format == "json") {
    auto j = nlohmann::ordered_json::parse(to_json(g, rep));
    j["schema"] = "alcsheaf.projective/1";
    j["type"] = g.roots().label();
    j["char"] = c.characteristic;
    j["window"] = window;
    std::cout << j.dump(2) << "\n";
  } else if (c.format == "csv") {
    std::cout << verma_csv(g, rep.normalized);
  } else {
    std::cout << "alcove " << g.format(a) << "  " << g.format_coords(a) << "\n"
              << "weight " << nlohmann::json(rep.plan.lambda).dump() << ", base " << g.format(rep.plan.base)
              << ", word " << nlohmann::json(rep.plan.word).dump() << ", shift " << rep.shift << "\n"
              << "End_0 dimension " << rep.endomorphism_dim << (rep.local ? ", local" : ", not local")
              << ", maps onto the standard object " << rep.hom_to_standard << ", window " << window << "\n";
    for (const auto& line : rep.decomposition) std::cout << "  " << line << "\n";
    if (c.trace)
      for (const auto& [s, t] : rep.steps) std::cout << "after wall " << s << ":\n" << table_text(g, t);
    std::cout << "normalized table:\n" << table_text(g, rep.normalized);
  }
  auto it = rep.normalized.find(a);
  bool ok = rep.epi && rep.local && it != rep.normalized.end() && it->second == RankSeries::parse("1");
  if (!ok) std::cerr << "certification failed\n";
  return ok ? kOk : kFailure;
}

int cmd_verify(const JobConfig& c) {
  AlcoveGeometry g(root_system(c));
  validate_char(c);
  cli::SuiteConfig config{c.characteristic, parse_weight(g, c.weight), c.window};
  std::vector<cli::SuiteResult> results;
  try {
    results = cli::run_suite(g, c.suite, config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::cout << cli::to_json(g, config, results) << "\n";
  bool pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  return pass ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sheaves on alcoves: order, projective objects and property checks"};
  app.require_subcommand(1);
  JobConfig c;

  auto* order = app.add_subcommand("order", "compare alcoves and list intervals, ideals and windows");
  add_common(order, c);
  order->add_option("--compare", c.compare, "two alcoves")->expected(2);
  order->add_option("--interval", c.interval, "two alcoves A <= B")->expected(2);
  order->add_option("--ideal", c.ideal, "alcoves below A inside the window around A");
  order->add_option("--alcove", c.alcove, "window center");
  order->add_flag("--list", c.list, "print the window around --alcove as JSON");

  auto* projective = app.add_subcommand("projective", "build the indecomposable projective object of an alcove");
  add_common(projective, c);
  projective->add_option("--alcove", c.alcove, "alcove as k=... coordinates or w=...;t=...");
  projective->add_flag("--trace", c.trace, "print the table after every wall crossing");

  auto* verify = app.add_subcommand("verify", "run property suites and print a JSON report");
  add_common(verify, c);
  std::string names = "all";
  for (const auto& n : cli::suite_names()) names += ", " + n;
  verify->add_option("--suite", c.suite, "one of: " + names);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    std::optional<DegreeCapScope> cap;
    if (c.degree_cap >= 0) cap.emplace(c.degree_cap);
    if (*order) return cmd_order(c);
    if (*projective) return cmd_projective(c);
    return cmd_verify(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kFailure;
  }
}
