#pragma once
// Deterministic parallel reduction. The index range is cut into fixed-size
// chunks independent of the worker count, per-chunk partial results land in a
// slot keyed by chunk id, and the final combine walks the slots in order.
// With integer accumulators every parallelism degree produces bit-identical
// results.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "core.hpp"

namespace toepsq {

inline constexpr SeqIndex kReduceChunkDefault = SeqIndex(1) << 16;

// chunk_fn(a, b) -> Acc over the inclusive subrange [a, b];
// combine(acc, part) -> Acc, applied in ascending chunk order.
template <typename Acc, typename ChunkFn, typename CombineFn>
Acc chunked_reduce(SeqIndex lo, SeqIndex hi, int threads, Acc init, ChunkFn chunk_fn,
                   CombineFn combine, SeqIndex chunk_len = kReduceChunkDefault) {
    if (lo > hi) return init;
    if (threads < 1) threads = 1;
    if (chunk_len < 1) throw domain_error("chunked_reduce: chunk_len must be >= 1");
    USeqIndex span = USeqIndex(hi - lo) + 1;
    USeqIndex n_chunks128 = (span + USeqIndex(chunk_len) - 1) / USeqIndex(chunk_len);
    if (n_chunks128 > (USeqIndex(1) << 32))
        throw capacity_error("chunked_reduce: range produces too many chunks");
    const std::size_t n_chunks = std::size_t(n_chunks128);

    std::vector<Acc> parts(n_chunks, init);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t id = next.fetch_add(1, std::memory_order_relaxed);
            if (id >= n_chunks) return;
            SeqIndex a = lo + SeqIndex(id) * chunk_len;
            SeqIndex b = std::min(hi, a + chunk_len - 1);
            try {
                parts[id] = chunk_fn(a, b);
            } catch (...) {
                std::lock_guard<std::mutex> guard(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    Acc out = std::move(init);
    for (Acc& part : parts) out = combine(std::move(out), std::move(part));
    return out;
}

}  // namespace toepsq
