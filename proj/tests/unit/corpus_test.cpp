#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "llama/corpus/pool.hpp"
#include "llama/rng.hpp"
#include "oracle_checks.hpp"
#include "vm_micro.hpp"

using namespace llama;
using namespace llama::corpus;
using namespace llama::test;

TEST_CASE("prefuzz score arithmetic") {
  PreFuzzScore s;
  s.coverage = 50;
  s.exception = 1;
  s.lambda = 0.5;
  s.score = static_cast<double>(s.coverage) + s.lambda * s.exception;
  CHECK(s.score == doctest::Approx(50.5));

  // score from traces: coverage counts unique sites + edges, exception flag
  bytes code = Asm{}
                   .push(1).jumpi_to("t")
                   .jumpdest("t")
                   .push(1).push(0).op(vm::OP_SSTORE)
                   .op(vm::OP_STOP)
                   .build();
  auto r = run_code(code);
  auto sc = score_from_traces({r.trace}, 0.5);
  std::set<uint32_t> pcs;
  for (auto& i : r.trace.instr_sites) pcs.insert(i.pc);
  CHECK(sc.coverage == pcs.size() + 1);  // one unique branch edge
  CHECK(sc.exception == 0);
  CHECK(sc.score == doctest::Approx(static_cast<double>(sc.coverage)));

  // same seed, same traces -> same score
  auto sc2 = score_from_traces({run_code(code).trace}, 0.5);
  CHECK(sc.score == sc2.score);

  // an exception adds exactly lambda
  bytes rev = Asm{}.push(0).push(0).op(vm::OP_REVERT).build();
  auto sr = score_from_traces({run_code(rev).trace}, 0.5);
  CHECK(sr.exception == 1);
  CHECK(sr.score == doctest::Approx(static_cast<double>(sr.coverage) + 0.5));
}

TEST_CASE("top-k formula") {
  auto mk = [](int n) {
    std::vector<ScoredSeed> v(n);
    for (int i = 0; i < n; ++i) {
      v[i].seed.txs.push_back({"f", {std::to_string(i)}, 0, 0, {}});
      v[i].seed.rehash();
      v[i].score.score = i;
    }
    return v;
  };
  TopKConfig cfg;
  cfg.rho = 0.1;
  cfg.k_max = 20;
  CHECK(select_top_k(mk(100), cfg).size() == 10);  // ceil(10)=10, min(20,10)
  cfg.k_max = 32;
  CHECK(select_top_k(mk(500), cfg).size() == 32);  // min(32,50)
  cfg.rho = 0.5;
  CHECK(select_top_k(mk(3), cfg).size() == 2);  // ceil(1.5)
}

TEST_CASE("top-k equals brute force on random instances") {
  auto err = check_topk_bruteforce(200, 0x70B1C);
  CHECK_MESSAGE(!err, err.value_or(""));
}

TEST_CASE("top-k bounds hold for all N") {
  Rng rng(3);
  for (int n = 1; n <= 40; ++n) {
    std::vector<ScoredSeed> v(n);
    for (int i = 0; i < n; ++i) {
      v[i].seed.txs.push_back({"f", {std::to_string(i * 7 + n)}, 0, 0, {}});
      v[i].seed.rehash();
      v[i].score.score = rng.unit();
    }
    TopKConfig cfg;
    cfg.rho = 0.25;
    cfg.k_max = 8;
    auto out = select_top_k(v, cfg);
    CHECK(out.size() >= 1);
    CHECK(out.size() <= std::min<size_t>(cfg.k_max, n));
  }
}

TEST_CASE("seed id is stable and canonical") {
  Seed a;
  a.txs.push_back({"transfer", {"0x01", "5"}, 1, 1000, {}});
  a.rehash();
  Seed b = a;
  b.fitness.fit = 99;  // metadata must not affect identity
  b.rehash();
  CHECK(a.id == b.id);

  Seed c = a;
  c.txs[0].value = 1001;
  c.rehash();
  CHECK(a.id != c.id);
}

TEST_CASE("corpus persist/load round-trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "llama_corpus_test";
  fs::remove_all(dir);

  std::vector<Seed> pool;
  for (int i = 0; i < 10; ++i) {
    Seed s;
    Transaction tx{"f", {std::to_string(i)}, i % 3, u256(i) * 7, {}};
    if (i % 2) tx.env.timestamp = 123456 + i;
    if (i % 3 == 0) tx.env.call_return_override = u256(0);
    s.txs.push_back(tx);
    s.origin = SeedOrigin::Stub;
    s.fitness = {1, 2, 3, 6};
    s.rehash();
    pool.push_back(s);
  }
  persist(pool, dir.string());
  auto loaded = load(dir.string());
  REQUIRE(loaded.size() == pool.size());

  std::set<std::string> want, got;
  for (const auto& s : pool) want.insert(s.id);
  for (const auto& s : loaded) got.insert(s.id);
  CHECK(want == got);
  // fitness records survive the round trip
  for (const auto& s : loaded) CHECK(s.fitness.fit == 6);

  SUBCASE("truncated file is rejected") {
    auto first = fs::directory_iterator(dir)->path();
    std::ofstream out(first, std::ios::trunc);
    out << "{\"id\": \"feed";
    out.close();
    CHECK_THROWS_AS(load(dir.string()), CorruptCorpus);
  }
  SUBCASE("tampered content is rejected by the id check") {
    auto first = fs::directory_iterator(dir)->path();
    std::ifstream in(first);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.find("\"function\": \"f\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 15, "\"function\": \"g\"");
    std::ofstream out(first, std::ios::trunc);
    out << text;
    out.close();
    CHECK_THROWS_AS(load(dir.string()), CorruptCorpus);
  }

  fs::remove_all(dir);

  SUBCASE("empty pool round-trips") {
    fs::path empty_dir = fs::temp_directory_path() / "llama_corpus_empty";
    fs::remove_all(empty_dir);
    persist({}, empty_dir.string());
    CHECK(load(empty_dir.string()).empty());
    fs::remove_all(empty_dir);
  }
}
