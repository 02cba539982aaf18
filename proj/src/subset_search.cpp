#include "subset_search.hpp"

#include <atomic>
#include <limits>

#include "parallel.hpp"

namespace veronese::detail {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t subset_rank(std::span<const std::size_t> positions, std::size_t n) {
  const std::size_t k = positions.size();
  std::uint64_t rank = 0;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t v = lo; v < positions[i]; ++v) rank += binomial(n - 1 - v, k - 1 - i);
    lo = positions[i] + 1;
  }
  return rank;
}

namespace {

class Searcher {
public:
  Searcher(const ColumnStore& cols, const FieldCtx& f, std::span<const std::size_t> universe, std::size_t k,
           bool first_mode)
      : cols_(cols), universe_(universe), k_(k), first_mode_(first_mode), ws_(f, cols.dim(), k),
        chosen_(k) {}

  // Explores every subset whose smallest position is `first`.
  void run_task(std::size_t first, std::uint64_t limit) {
    ws_.clear();
    local_ = 0;
    limit_ = limit;
    cut_ = false;
    found_.reset();
    visit(first, 0);
  }

  std::uint64_t local() const { return local_; }
  bool cut() const { return cut_; }
  const std::optional<std::vector<std::size_t>>& found() const { return found_; }
  std::size_t prefix() const { return prefix_; }
  std::vector<std::vector<std::size_t>>& all() { return all_; }

private:
  std::vector<std::size_t> columns_of(std::size_t len) const {
    std::vector<std::size_t> out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = universe_[chosen_[i]];
    return out;
  }

  // Returns true when the search must stop.
  bool visit(std::size_t pos, std::size_t depth) {
    const auto col = cols_[universe_[pos]];
    chosen_[depth] = pos;
    if (depth + 1 == k_) {
      if (++local_ > limit_) {
        cut_ = true;
        return true;
      }
      if (!ws_.in_span(col)) return false;
      if (first_mode_) {
        found_ = columns_of(k_);
        prefix_ = k_;
        return true;
      }
      all_.push_back(columns_of(k_));
      return false;
    }
    if (!ws_.push(col)) {
      // The prefix is already dependent, so every completion is.
      const std::size_t need = k_ - depth - 1;
      if (first_mode_) {
        if (++local_ > limit_) {
          cut_ = true;
          return true;
        }
        for (std::size_t i = 1; i <= need; ++i) chosen_[depth + i] = pos + i;
        found_ = columns_of(k_);
        prefix_ = depth + 1;
        return true;
      }
      complete_all(pos + 1, depth + 1);
      return false;
    }
    const std::size_t last = universe_.size() - k_ + depth + 1;
    for (std::size_t q = pos + 1; q <= last; ++q)
      if (visit(q, depth + 1)) return true;
    ws_.pop();
    return false;
  }

  void complete_all(std::size_t from, std::size_t depth) {
    if (depth == k_) {
      ++local_;
      all_.push_back(columns_of(k_));
      return;
    }
    const std::size_t last = universe_.size() - k_ + depth;
    for (std::size_t q = from; q <= last; ++q) {
      chosen_[depth] = q;
      complete_all(q + 1, depth + 1);
    }
  }

  const ColumnStore& cols_;
  std::span<const std::size_t> universe_;
  std::size_t k_;
  bool first_mode_;
  SpanWorkspace ws_;
  std::vector<std::size_t> chosen_;
  std::uint64_t local_ = 0, limit_ = 0;
  bool cut_ = false;
  std::optional<std::vector<std::size_t>> found_;
  std::size_t prefix_ = 0;
  std::vector<std::vector<std::size_t>> all_;
};

}  // namespace

FirstDependent first_dependent(const ColumnStore& cols, const FieldCtx& f,
                               std::span<const std::size_t> universe, std::size_t k, unsigned workers,
                               std::uint64_t budget) {
  FirstDependent result;
  const std::size_t U = universe.size();
  const std::uint64_t total = binomial(U, k);
  if (k == 0 || k > U) return result;

  const std::size_t tasks = U - k + 1;
  std::vector<std::uint64_t> offset(tasks + 1, 0);
  for (std::size_t i = 0; i < tasks; ++i) offset[i + 1] = offset[i] + binomial(U - 1 - i, k - 1);

  struct TaskResult {
    bool done = false, cut = false;
    std::optional<std::vector<std::size_t>> subset;
    std::size_t prefix = 0;
    std::uint64_t local = 0;
  };
  std::vector<TaskResult> results(tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};

  run_workers(workers, [&](unsigned) {
    Searcher s(cols, f, universe, k, true);
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks || i > best.load()) break;
      auto& r = results[i];
      if (offset[i] >= budget) {
        r.done = r.cut = true;
      } else {
        s.run_task(i, budget - offset[i]);
        r.done = true;
        r.cut = s.cut();
        r.subset = s.found();
        r.prefix = s.prefix();
        r.local = s.local();
      }
      if (r.cut || r.subset) {
        std::size_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
        break;
      }
    }
  });

  for (std::size_t i = 0; i < tasks; ++i) {
    const auto& r = results[i];
    if (r.subset) {
      result.subset = r.subset;
      result.dependent_prefix = r.prefix;
      result.examined = offset[i] + r.local;
      return result;
    }
    if (r.cut) {
      result.budget_cut = true;
      result.examined = budget;
      return result;
    }
  }
  result.examined = total;
  return result;
}

std::vector<std::vector<std::size_t>> all_dependent(const ColumnStore& cols, const FieldCtx& f,
                                                    std::span<const std::size_t> universe, std::size_t k,
                                                    unsigned workers) {
  const std::size_t U = universe.size();
  if (k == 0 || k > U) return {};
  const std::size_t tasks = U - k + 1;
  std::vector<std::vector<std::vector<std::size_t>>> per_task(tasks);
  std::atomic<std::size_t> next{0};
  run_workers(workers, [&](unsigned) {
    Searcher s(cols, f, universe, k, false);
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) break;
      s.all().clear();
      s.run_task(i, std::numeric_limits<std::uint64_t>::max());
      per_task[i] = std::move(s.all());
    }
  });
  std::vector<std::vector<std::size_t>> out;
  for (auto& v : per_task)
    for (auto& s : v) out.push_back(std::move(s));
  return out;
}

}  // namespace veronese::detail
