#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "shepherd/agents.hpp"
#include "shepherd/goalsearch.hpp"
#include "shepherd/learning.hpp"
#include "shepherd/world.hpp"

using namespace shepherd;

namespace {

void BM_UpdateCows(benchmark::State& state) {
    const int cows = static_cast<int>(state.range(0));
    const GridMap map = build_map(100, 160, {40, 40, 59, 59}, 1, cows + 6);
    WorldState world = place_entities(map, cows, 6, 2, 3);
    const CowParams params;
    for (auto _ : state) {
        world.cows = update_cows(world, map, params);
        ++world.step;
        benchmark::DoNotOptimize(world.cows.data());
    }
    state.SetItemsProcessed(state.iterations() * cows);
}
BENCHMARK(BM_UpdateCows)->Arg(16)->Arg(48)->Arg(130)->Arg(500);

std::vector<QTable> random_tables(int count, int keys, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> bin(1, 14);
    std::uniform_int_distribution<int> act(0, QTable::kActions - 1);
    std::uniform_int_distribution<int> visits(0, 50);
    std::uniform_real_distribution<double> q(-10.0, 100.0);
    std::vector<QTable> tables;
    for (int t = 0; t < count; ++t) {
        QTable table(Behavior::SoloHerding);
        for (int k = 0; k < keys; ++k)
            table.set({{bin(rng), bin(rng), bin(rng)}, act(rng)}, {q(rng), visits(rng)});
        tables.push_back(std::move(table));
    }
    return tables;
}

void BM_FuseTables(benchmark::State& state) {
    const auto tables = random_tables(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(fuse_tables(tables));
}
BENCHMARK(BM_FuseTables)->Args({2, 200})->Args({6, 1000})->Args({10, 5000});

void BM_MapAction(benchmark::State& state) {
    const GridMap map(40, {}, {30, 18, 33, 22});
    ActionView view;
    view.self = {14, 25};
    view.herd.members = {{20, 19}, {20, 20}, {20, 21}, {21, 20}, {19, 20}, {21, 21}};
    view.herd.gcm = centroid(view.herd.members);
    view.target = {30, 20};
    view.abstraction = {6.0, 10.0, 40.0};
    int a = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(map_action(a, view, map));
        a = (a + 1) % kMoveCount;
    }
}
BENCHMARK(BM_MapAction);

void BM_GoalSearchEpisode(benchmark::State& state) {
    const GoalWorld world = canonical_goal_world();
    TrialConfig config;
    config.fusion = state.range(0) != 0;
    GoalSearch search(world, config, 11);
    int episode = 1;
    for (auto _ : state) benchmark::DoNotOptimize(search.run_episode(episode++));
}
BENCHMARK(BM_GoalSearchEpisode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
