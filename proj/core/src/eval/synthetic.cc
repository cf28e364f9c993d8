#include "strata/eval/synthetic.h"

#include <algorithm>
#include <array>
#include <random>

#include "strata/common/time.h"
#include "strata/eval/statistics.h"

namespace strata::eval {

namespace {

struct Hobby {
  const char* activity;
  const char* place;
  const char* mentor;
  const char* reason;
};

constexpr std::array<Hobby, 12> kHobbies{{
    {"pottery", "the Riverside studio", "Grace", "she wanted something calm after work"},
    {"rock climbing", "the Summit gym", "Oscar", "her doctor suggested more exercise"},
    {"painting", "the Lakeview art center", "Priya", "she missed drawing since college"},
    {"salsa dancing", "the Havana club", "Marco", "her friends kept inviting her"},
    {"gardening", "the Elm Street allotment", "Ruth", "she wanted fresh vegetables"},
    {"violin", "the Harmony music school", "Ivan", "she heard a concert downtown"},
    {"running", "the Greenway trail", "Keisha", "she signed up for a charity race"},
    {"baking", "the Golden Crust bakery", "Pierre", "her grandmother left her a recipe book"},
    {"photography", "the Harbor camera club", "Yuki", "she bought a new camera"},
    {"kayaking", "the Bluewater marina", "Dylan", "she moved close to the lake"},
    {"chess", "the Knight library", "Boris", "her nephew challenged her"},
    {"yoga", "the Lotus center", "Anika", "her back had been hurting"},
}};

constexpr std::array<const char*, 10> kCities{"Lisbon", "Denver", "Kyoto", "Toronto", "Austin",
                                             "Prague", "Seattle", "Dublin", "Oslo", "Nairobi"};
constexpr std::array<const char*, 6> kPets{"a puppy named Biscuit", "a cat named Luna", "a parrot named Kiwi",
                                          "a rabbit named Clover", "a turtle named Shelly", "a beagle named Max"};
constexpr std::array<std::pair<const char*, const char*>, 4> kSpeakers{
    {{"Melanie", "Caroline"}, {"Joanna", "Nate"}, {"Audrey", "Andrew"}, {"Gina", "Jon"}}};
constexpr std::array<const char*, 12> kMonths{"January", "February", "March",     "April",   "May",      "June",
                                              "July",    "August",   "September", "October", "November", "December"};

std::string header(std::int64_t days, int hour) {
  const CivilDate d = civil_from_days(days);
  const int h12 = hour % 12 == 0 ? 12 : hour % 12;
  return std::to_string(h12) + ":00 " + (hour < 12 ? "am" : "pm") + " on " + std::to_string(d.day) + " " +
         kMonths[d.month - 1] + ", " + std::to_string(d.year);
}

std::string long_date(std::int64_t days) {
  const CivilDate d = civil_from_days(days);
  return std::to_string(d.day) + " " + kMonths[d.month - 1] + " " + std::to_string(d.year);
}

struct SessionFacts {
  std::size_t hobby;
  std::size_t city;
  std::size_t pet;
  std::int64_t day;
  std::int64_t trip_day;
  bool has_pet;
  bool follows_up;
  std::vector<std::string> dia;  // per turn
};

std::string dia_id(std::size_t session, std::size_t turn) {
  return "D" + std::to_string(session + 1) + ":" + std::to_string(turn + 1);
}

ingest::ExtractionResult plain_extraction(const ingest::Session& session) {
  ingest::ExtractionResult r;
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (const ingest::Turn& t : session.turns) {
    if (!r.episode_summary.empty()) r.episode_summary += " ";
    r.episode_summary += t.speaker + " said: " + t.text;
    by_speaker[t.speaker].push_back(r.facet_points.size());
    r.facet_points.push_back({t.speaker + ": " + t.text, std::nullopt, std::nullopt});
  }
  for (auto& [speaker, idx] : by_speaker) r.facets.push_back({"Remarks by " + speaker, idx});
  return r;
}

}  // namespace

SyntheticSet make_synthetic(const SynthOptions& options) {
  SyntheticSet set;
  std::mt19937_64 rng(options.seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(bounded_draw(rng, n)); };

  const auto [a, b] = kSpeakers[pick(kSpeakers.size())];
  set.conversation.conversation_id = options.conversation_id;

  std::int64_t day = days_from_civil(2023, 1, 8) + static_cast<std::int64_t>(pick(30));
  std::vector<SessionFacts> facts;
  std::vector<std::size_t> hobby_order(kHobbies.size());
  for (std::size_t i = 0; i < hobby_order.size(); ++i) hobby_order[i] = i;
  std::shuffle(hobby_order.begin(), hobby_order.end(), rng);

  for (std::size_t s = 0; s < options.sessions; ++s) {
    SessionFacts f;
    f.hobby = hobby_order[s % hobby_order.size()];
    f.city = pick(kCities.size());
    f.pet = pick(kPets.size());
    f.day = day;
    f.trip_day = day - 3 - static_cast<std::int64_t>(pick(4));
    f.has_pet = pick(3) == 0;
    f.follows_up = s > 0 && pick(2) == 0;
    const Hobby& h = kHobbies[f.hobby];

    ingest::Session session;
    session.timestamp = header(day, 9 + static_cast<int>(pick(10)));
    auto say = [&](const char* who, std::string text) {
      f.dia.push_back(dia_id(s, session.turns.size()));
      session.turns.push_back({who, std::move(text), f.dia.back()});
    };
    say(a, std::string("I started ") + h.activity + " at " + h.place + " last week.");
    say(b, std::string("That sounds great! Who got you into ") + h.activity + "?");
    say(a, std::string(h.mentor) + " got me into it because " + h.reason + ".");
    say(b, std::string("I flew to ") + kCities[f.city] + " with my family " + std::to_string(day - f.trip_day) +
               " days ago.");
    if (f.has_pet) say(a, std::string("We also adopted ") + kPets[f.pet] + " this weekend.");
    if (f.follows_up) {
      const Hobby& prev = kHobbies[facts.back().hobby];
      say(a, std::string("After the ") + prev.activity + " classes I decided to try " + h.activity + " as well.");
    }
    set.conversation.sessions.push_back(std::move(session));
    facts.push_back(std::move(f));
    day += 5 + static_cast<std::int64_t>(pick(10));
  }

  // Questions cycle through the kinds so every category is present.
  for (std::size_t q = 0; q < options.questions; ++q) {
    const std::size_t s = pick(facts.size());
    const SessionFacts& f = facts[s];
    const Hobby& h = kHobbies[f.hobby];
    QueryRecord r;
    r.conversation_id = options.conversation_id;
    switch (q % 6) {
      case 0:
        r.question = std::string("When did ") + a + " start " + h.activity + "?";
        r.gold_answer = "The week before " + long_date(f.day);
        r.category = "temporal";
        r.evidence = {f.dia[0]};
        break;
      case 1:
        r.question = std::string("Why did ") + a + " get into " + h.activity + "?";
        r.gold_answer = std::string("Because ") + h.reason;
        r.category = "single_hop";
        r.evidence = {f.dia[2]};
        break;
      case 2:
        r.question = std::string("Where does ") + a + " practice " + h.activity + "?";
        r.gold_answer = h.place;
        r.category = "single_hop";
        r.evidence = {f.dia[0]};
        break;
      case 3:
        r.question = std::string("Which city did ") + b + " fly to with family?";
        r.gold_answer = kCities[f.city];
        r.category = "open_domain";
        r.evidence = {f.dia[3]};
        break;
      case 4: {
        const std::size_t s2 = std::min(s + 1, facts.size() - 1);
        r.question = std::string("Which activities did ") + a + " start in the sessions about " + h.activity + " and " +
                     kHobbies[facts[s2].hobby].activity + "?";
        r.gold_answer = std::string(h.activity) + " and " + kHobbies[facts[s2].hobby].activity;
        r.category = "multi_hop";
        r.evidence = {f.dia[0], facts[s2].dia[0]};
        break;
      }
      default:
        r.question = std::string("How many days before ") + long_date(f.day) + " did " + b + " fly to " +
                     kCities[f.city] + "?";
        r.gold_answer = std::to_string(f.day - f.trip_day) + " days";
        r.category = "temporal";
        r.evidence = {f.dia[3]};
        break;
    }
    r.id = options.conversation_id + "#" + std::to_string(q);
    set.records.push_back(std::move(r));
  }

  if (options.bridge_free) {
    set.ingest_config.link_episode_chain = false;
    set.ingest_config.causal_consolidation = false;
    // Sessions are generated in time order, so chunk i is session i.
    const auto chunks = ingest::chunk_conversation(set.conversation);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      set.pre_extracted[chunks[i].content_hash] = plain_extraction(set.conversation.sessions[i]);
    }
  }
  return set;
}

}  // namespace strata::eval
