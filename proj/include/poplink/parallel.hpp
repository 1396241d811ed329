#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace poplink {

/// Run fn(begin, end, chunk) over [0, n) split into contiguous chunks, one
/// thread per chunk. Chunk boundaries depend only on n and `chunks`, so a
/// caller that writes per-chunk results and concatenates them in chunk order
/// gets the same output for any worker count.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t workers, std::size_t chunks, Fn &&fn) {
	if (n == 0) {
		return;
	}
	chunks = std::max<std::size_t>(1, std::min(chunks, n));
	auto bound = [&](std::size_t c) { return n * c / chunks; };
	workers = std::max<std::size_t>(1, std::min(workers, chunks));
	if (workers == 1) {
		for (std::size_t c = 0; c < chunks; ++c) {
			fn(bound(c), bound(c + 1), c);
		}
		return;
	}
	std::exception_ptr error;
	std::mutex mu;
	std::size_t next = 0;
	std::vector<std::thread> pool;
	pool.reserve(workers);
	for (std::size_t w = 0; w < workers; ++w) {
		pool.emplace_back([&] {
			for (;;) {
				std::size_t c;
				{
					std::lock_guard lock(mu);
					if (next == chunks || error) {
						return;
					}
					c = next++;
				}
				try {
					fn(bound(c), bound(c + 1), c);
				} catch (...) {
					std::lock_guard lock(mu);
					if (!error) {
						error = std::current_exception();
					}
				}
			}
		});
	}
	for (auto &t : pool) {
		t.join();
	}
	if (error) {
		std::rethrow_exception(error);
	}
}

/// Map every index to a vector of results and concatenate them in index
/// order. fn(i, out) appends the results for item i.
template <class T, class Fn>
std::vector<T> parallel_collect(std::size_t n, std::size_t workers, Fn &&fn) {
	const std::size_t chunks = std::min<std::size_t>(n, 64);
	std::vector<std::vector<T>> parts(std::max<std::size_t>(chunks, 1));
	parallel_chunks(n, workers, chunks, [&](std::size_t b, std::size_t e, std::size_t c) {
		for (std::size_t i = b; i < e; ++i) {
			fn(i, parts[c]);
		}
	});
	std::size_t total = 0;
	for (const auto &p : parts) {
		total += p.size();
	}
	std::vector<T> out;
	out.reserve(total);
	for (auto &p : parts) {
		out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
	}
	return out;
}

inline std::size_t hardware_workers() {
	auto n = std::thread::hardware_concurrency();
	return n == 0 ? 1 : n;
}

} // namespace poplink
