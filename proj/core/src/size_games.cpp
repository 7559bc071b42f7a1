#include "efq/size_games.hpp"

#include <set>

#include "size_games_internal.hpp"

namespace efq {

FormulaPtr atomic_separation(const std::vector<Context>& a, const std::vector<Context>& b) {
  std::vector<const Context*> pa, pb;
  for (const auto& c : a) pa.push_back(&c);
  for (const auto& c : b) pb.push_back(&c);
  return detail::atomic_separation_ptrs(pa, pb);
}

SizeGameSolver::SizeGameSolver(QuantifierSet qset, Caps caps, SizeGameOptions options)
    : impl_(std::make_shared<detail::SizeImpl>(std::move(qset), caps, options)) {}

const QuantifierSet& SizeGameSolver::quantifiers() const { return impl_->qset; }

long long SizeGameSolver::positions_explored() const { return impl_->positions; }

namespace {
void check_budget(const Caps& caps, int budget) {
  if (budget < 1) throw PreconditionError("size game: budget must be positive");
  Caps::check("max_budget", caps.max_budget, budget);
}
}  // namespace

bool SizeGameSolver::class_game(const std::vector<Context>& a, const std::vector<Context>& b,
                                int budget) {
  check_budget(impl_->caps, budget);
  return impl_->class_win(budget, impl_->intern_class(a), impl_->intern_class(b));
}

ClassGameResult SizeGameSolver::solve_class_game(const std::vector<Context>& a,
                                                 const std::vector<Context>& b, int budget) {
  check_budget(impl_->caps, budget);
  auto ca = impl_->intern_class(a), cb = impl_->intern_class(b);
  ClassGameResult r;
  r.budget = budget;
  if (impl_->class_win(budget, ca, cb)) {
    r.winner = Player::I;
    r.witness = impl_->class_formula(budget, ca, cb, &r.strategy, 0);
  }
  return r;
}

WeakGameResult SizeGameSolver::solve_weak_game(const std::vector<Context>& a,
                                               const std::vector<Context>& b, int budget) {
  check_budget(impl_->caps, budget);
  WeakGameResult r;
  r.budget = budget;
  r.winner = Player::I;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      detail::Class ca{impl_->intern(a[i])}, cb{impl_->intern(b[j])};
      if (!impl_->class_win(budget, ca, cb)) {
        r.winner = Player::II;
        r.left_index = static_cast<int>(i);
        r.right_index = static_cast<int>(j);
        r.witnesses.clear();
        return r;
      }
      r.witnesses.push_back(impl_->class_formula(budget, ca, cb, nullptr, 0));
    }
  return r;
}

bool SizeGameSolver::pair_game(const Context& a, const Context& b, int budget) {
  check_budget(impl_->caps, budget);
  return impl_->pair_win(budget, impl_->intern(a), impl_->intern(b));
}

PairGameResult SizeGameSolver::solve_pair_game(const Context& a, const Context& b, int budget) {
  check_budget(impl_->caps, budget);
  const int ia = impl_->intern(a), ib = impl_->intern(b);
  PairGameResult r;
  r.budget = budget;
  if (impl_->pair_win(budget, ia, ib)) {
    r.winner = Player::I;
    std::set<std::tuple<int, int, int>> seen;
    impl_->pair_strategy(budget, ia, ib, r.strategy, 0, seen);
  }
  return r;
}

std::optional<int> SizeGameSolver::min_class_budget(const std::vector<Context>& a,
                                                    const std::vector<Context>& b,
                                                    int max_budget) {
  for (int s = 1; s <= max_budget; ++s)
    if (class_game(a, b, s)) return s;
  return std::nullopt;
}

std::optional<int> SizeGameSolver::min_weak_budget(const std::vector<Context>& a,
                                                   const std::vector<Context>& b,
                                                   int max_budget) {
  for (int s = 1; s <= max_budget; ++s)
    if (solve_weak_game(a, b, s).winner == Player::I) return s;
  return std::nullopt;
}

std::optional<int> SizeGameSolver::min_pair_budget(const Context& a, const Context& b,
                                                   int max_budget) {
  for (int s = 1; s <= max_budget; ++s)
    if (pair_game(a, b, s)) return s;
  return std::nullopt;
}

ClassGameResult solve_class_game(const std::vector<Context>& a, const std::vector<Context>& b,
                                 int budget, const QuantifierSet& qset, const Caps& caps,
                                 SizeGameOptions options) {
  return SizeGameSolver(qset, caps, options).solve_class_game(a, b, budget);
}

WeakGameResult solve_weak_game(const std::vector<Context>& a, const std::vector<Context>& b,
                               int budget, const QuantifierSet& qset, const Caps& caps,
                               SizeGameOptions options) {
  return SizeGameSolver(qset, caps, options).solve_weak_game(a, b, budget);
}

PairGameResult solve_pair_game(const Context& a, const Context& b, int budget,
                               const QuantifierSet& qset, const Caps& caps,
                               SizeGameOptions options) {
  return SizeGameSolver(qset, caps, options).solve_pair_game(a, b, budget);
}

}  // namespace efq
