#include "btit/open_queue.hpp"

#include "btit/errors.hpp"

namespace btit::search {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool OpenQueue::before(const Entry& a, const Entry& b) noexcept
{
  if (a.key != b.key)
    return a.key < b.key;
  if (a.g != b.g)
    return a.g > b.g;
  return a.id < b.id;
}

void OpenQueue::push(const Entry& e)
{
  if (e.id == graph::kNoNode)
    throw PreconditionError("OpenQueue::push: invalid id");
  if (contains(e.id))
    erase(e.id);
  if (slot_.size() <= e.id)
    slot_.resize(std::size_t(e.id) + 1);
  slot_[e.id] = e;
  by_key_.insert(e);
  by_f_.emplace(e.f, e.id);
  by_g_.emplace(e.g, e.id);
  by_pr_.emplace(e.pr(), e.id);
}

void OpenQueue::erase(NodeId id)
{
  if (!contains(id))
    return;
  Entry& e = slot_[id];
  by_key_.erase(e);
  by_f_.erase({e.f, id});
  by_g_.erase({e.g, id});
  by_pr_.erase({e.pr(), id});
  e = Entry{};
}

OpenQueue::Entry OpenQueue::top() const
{
  if (by_key_.empty())
    throw PreconditionError("OpenQueue::top: queue is empty");
  return *by_key_.begin();
}

OpenQueue::Entry OpenQueue::pop()
{
  Entry e = top();
  erase(e.id);
  return e;
}

void OpenQueue::clear()
{
  by_key_.clear();
  by_f_.clear();
  by_g_.clear();
  by_pr_.clear();
  slot_.clear();
}

double OpenQueue::key_min() const noexcept { return by_key_.empty() ? kInf : by_key_.begin()->key; }
double OpenQueue::f_min() const noexcept { return by_f_.empty() ? kInf : by_f_.begin()->first; }
double OpenQueue::g_min() const noexcept { return by_g_.empty() ? kInf : by_g_.begin()->first; }
double OpenQueue::pr_min() const noexcept { return by_pr_.empty() ? kInf : by_pr_.begin()->first; }

}  // namespace btit::search
