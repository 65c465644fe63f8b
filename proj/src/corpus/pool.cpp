#include "llama/corpus/pool.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace llama::corpus {

namespace fs = std::filesystem;

PreFuzzScore score_from_traces(const std::vector<vm::ExecutionTrace>& traces, double lambda) {
  PreFuzzScore s;
  s.lambda = lambda;
  std::set<std::pair<Address, uint32_t>> sites;
  std::set<std::tuple<Address, uint32_t, bool>> edges;
  for (const auto& t : traces) {
    for (const auto& i : t.instr_sites) sites.insert({i.addr, i.pc});
    for (const auto& e : t.branch_edges) edges.insert({e.addr, e.pc, e.taken});
    if (t.exception != vm::VmException::None) s.exception = 1;
  }
  s.coverage = sites.size() + edges.size();
  s.score = static_cast<double>(s.coverage) + lambda * s.exception;
  return s;
}

PreFuzzScore prefuzz_score(const Seed& seed, const SeedRunner& run, double lambda) {
  return score_from_traces(run(seed), lambda);
}

std::vector<Seed> select_top_k(const std::vector<ScoredSeed>& scored, const TopKConfig& cfg) {
  size_t n = scored.size();
  if (n == 0) return {};
  uint64_t k = std::min<uint64_t>(
      cfg.k_max, static_cast<uint64_t>(std::ceil(cfg.rho * static_cast<double>(n))));
  if (k < 1) k = 1;

  std::vector<const ScoredSeed*> ranked;
  ranked.reserve(n);
  for (const auto& s : scored) ranked.push_back(&s);
  std::sort(ranked.begin(), ranked.end(), [](const ScoredSeed* a, const ScoredSeed* b) {
    if (a->score.score != b->score.score) return a->score.score > b->score.score;
    return a->seed.id < b->seed.id;
  });

  std::vector<Seed> out;
  for (size_t i = 0; i < std::min<size_t>(k, n); ++i) out.push_back(ranked[i]->seed);
  return out;
}

void persist(const std::vector<Seed>& pool, const std::string& dir_path) {
  std::error_code ec;
  fs::create_directories(dir_path, ec);
  if (ec) throw IoError("cannot create corpus dir: " + dir_path);
  for (const auto& s : pool) {
    fs::path file = fs::path(dir_path) / (s.id + ".json");
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    out << seed_to_json(s) << "\n";
  }
}

std::vector<Seed> load(const std::string& dir_path) {
  if (!fs::exists(dir_path)) throw IoError("no such corpus dir: " + dir_path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir_path))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<Seed> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw IoError("cannot read " + f.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.push_back(seed_from_json(text));
  }
  return out;
}

}  // namespace llama::corpus
