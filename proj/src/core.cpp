#include "comob/core.hpp"

namespace comob {

void append_events(EventLog& dst, const EventLog& src) {
  std::vector<Id> user_map(src.users.size());
  for (Id i = 0; i < src.users.size(); ++i)
    user_map[i] = dst.users.intern(src.users.name(i));
  std::vector<Id> comm_map(src.communities.size());
  for (Id i = 0; i < src.communities.size(); ++i)
    comm_map[i] = dst.communities.intern(src.communities.name(i));
  dst.events.reserve(dst.events.size() + src.events.size());
  for (const Event& e : src.events)
    dst.events.push_back({user_map[e.user], comm_map[e.community], e.ts});
}

}  // namespace comob
