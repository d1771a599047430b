#include "cmae/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "cmae/error.hpp"

namespace cmae {

// ---------------------------------------------------------------------------
// Task layouts.
//
// Actions (all grid tasks): 0=stay, 1=up(+y), 2=down(-y), 3=left(-x),
// 4=right(+x); Island adds 5=attack. Agents may share a cell; walls are thin
// (they sit between cells and block the crossing, they occupy no cell).
//
// Pass, 30x30: left room x in [0,14], right room x in [15,29]. The dividing
//   wall is crossable only at row 15 while the door is open. Switches at
//   (7,15) (left) and (22,15) (right); the door is open while either switch
//   is occupied. Agents start at (1,14) and (1,16). Solved when both agents
//   are in the right room.
//
// Secret-Room, 25x25: large room x in [0,16]; three small rooms x in [17,24]
//   split at y 0..7 / 8..16 / 17..24. Door rows 4, 12 and 20 in the dividing
//   wall; the wall segments between small rooms are solid. The large-room
//   switch (2,12) holds all three doors open; each small-room switch
//   ((21,3), (21,12), (21,21)) holds only its own door. Target room is the
//   middle one; agents start at (1,11) and (1,13).
//
// Push-Box, 15x15: box starts at (7,7), agents at (5,6) and (5,8). The box
//   advances one cell when both agents are orthogonally adjacent to it and
//   take the same direction action, provided the target cell is inside the
//   grid and not under an agent. Solved when the box reaches any wall.
//
// Island, 10x10: agents start at (1,1) and (8,1) with 5 energy, the wolf at
//   (5,5) with 8 energy. An attack action lands when the attacker is within
//   Chebyshev distance 1 of the wolf. After the agents act, the wolf attacks
//   an adjacent living agent (lowest index first) or walks one cell toward
//   the nearest living agent (Manhattan distance, longer axis first, x on
//   ties). Agents at zero energy are inert. Solved when the wolf's energy
//   reaches zero.
//
// Checkpoint rewards (dense modes) use concentric Chebyshev bands around a
// landmark; each band pays +0.1 the first time it is entered in an episode.
// ---------------------------------------------------------------------------

namespace {

constexpr int kDx[5] = {0, 0, 0, -1, 1};
constexpr int kDy[5] = {0, 1, -1, 0, 0};
constexpr double kCheckpointReward = 0.1;

int cheb(int x0, int y0, int x1, int y1) {
  return std::max(std::abs(x0 - x1), std::abs(y0 - y1));
}

// Concentric checkpoint bands around a landmark. Band i covers Chebyshev
// distances [i*width, (i+1)*width); positions beyond the outermost band are
// in no region.
struct RingSet {
  int cx = 0, cy = 0, width = 1, rings = 0;
  uint32_t claimed = 0;

  void reset() { claimed = 0; }

  double claim(int x, int y) {
    const int band = cheb(x, y, cx, cy) / width;
    if (band >= rings) return 0.0;
    const uint32_t bit = 1u << band;
    if (claimed & bit) return 0.0;
    claimed |= bit;
    return kCheckpointReward;
  }
};

struct Pos {
  int x = 0, y = 0;
};

}  // namespace

// --- enum plumbing ---

Task task_from_string(const std::string& name) {
  if (name == "pass") return Task::kPass;
  if (name == "secret-room" || name == "secret_room") return Task::kSecretRoom;
  if (name == "push-box" || name == "push_box") return Task::kPushBox;
  if (name == "island") return Task::kIsland;
  if (name == "matrix-game" || name == "matrix_game") return Task::kMatrixGame;
  throw ConfigError("unknown task name: " + name);
}

std::string to_string(Task task) {
  switch (task) {
    case Task::kPass: return "pass";
    case Task::kSecretRoom: return "secret-room";
    case Task::kPushBox: return "push-box";
    case Task::kIsland: return "island";
    case Task::kMatrixGame: return "matrix-game";
  }
  return "?";
}

RewardMode reward_mode_from_string(const std::string& name) {
  if (name == "sparse") return RewardMode::kSparse;
  if (name == "dense") return RewardMode::kDense;
  throw ConfigError("unknown reward mode: " + name);
}

std::string to_string(RewardMode mode) {
  return mode == RewardMode::kSparse ? "sparse" : "dense";
}

TaskSpec make_task_spec(Task task, RewardMode mode, int horizon, int matrix_actions) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  TaskSpec s;
  s.name = task;
  s.reward_mode = mode;
  s.horizon = horizon;
  switch (task) {
    case Task::kPass:
      s.grid_size = 30;
      s.state_dim = 5;
      s.action_count = 5;
      break;
    case Task::kSecretRoom:
      s.grid_size = 25;
      s.state_dim = 7;
      s.action_count = 5;
      break;
    case Task::kPushBox:
      s.grid_size = 15;
      s.state_dim = 6;
      s.action_count = 5;
      break;
    case Task::kIsland:
      s.grid_size = 10;
      s.state_dim = 9;
      s.action_count = 6;
      break;
    case Task::kMatrixGame:
      if (matrix_actions < 1) throw ConfigError("matrix game needs >= 1 action");
      s.grid_size = 1;
      s.state_dim = 1;
      s.action_count = matrix_actions;
      s.horizon = 1;
      break;
  }
  return s;
}

std::vector<int> component_cardinalities(const TaskSpec& spec) {
  const int g = spec.grid_size;
  switch (spec.name) {
    case Task::kPass: return {g, g, g, g, 2};
    case Task::kSecretRoom: return {g, g, g, g, 2, 2, 2};
    case Task::kPushBox: return {g, g, g, g, g, g};
    case Task::kIsland: return {g, g, g, g, g, g, 9, 6, 6};
    case Task::kMatrixGame: return {1};
  }
  throw ConfigError("component_cardinalities: unknown task");
}

// --- payoff tables ---

double PayoffTable::at(int a1, int a2) const {
  if (a1 < 0 || a1 >= actions || a2 < 0 || a2 >= actions)
    throw ContractViolation("PayoffTable::at: action out of range");
  return values[static_cast<size_t>(a1) * actions + a2];
}

double PayoffTable::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

bool PayoffTable::rows_constant() const {
  for (int a1 = 0; a1 < actions; ++a1)
    for (int a2 = 1; a2 < actions; ++a2)
      if (at(a1, a2) != at(a1, 0)) return false;
  return true;
}

PayoffTable PayoffTable::identity(int l) {
  PayoffTable t;
  t.actions = l;
  t.values.assign(static_cast<size_t>(l) * l, 0.0);
  for (int i = 0; i < l; ++i) t.values[static_cast<size_t>(i) * l + i] = 1.0;
  return t;
}

PayoffTable PayoffTable::uniform_random(int l, uint64_t seed) {
  PayoffTable t;
  t.actions = l;
  t.values.resize(static_cast<size_t>(l) * l);
  Rng rng(seed);
  for (auto& v : t.values) v = rng.real01();
  return t;
}

PayoffTable PayoffTable::row_constant(const std::vector<double>& row_values) {
  PayoffTable t;
  t.actions = static_cast<int>(row_values.size());
  t.values.resize(static_cast<size_t>(t.actions) * t.actions);
  for (int a1 = 0; a1 < t.actions; ++a1)
    for (int a2 = 0; a2 < t.actions; ++a2)
      t.values[static_cast<size_t>(a1) * t.actions + a2] = row_values[a1];
  return t;
}

double matrix_payoff(const JointAction& actions, const PayoffTable& table) {
  if (actions.size() != 2)
    throw ContractViolation("matrix_payoff: exactly two agents required");
  return table.at(actions[0], actions[1]);
}

// --- env base ---

std::pair<EnvState, JointObs> Env::reset(uint64_t seed) {
  rng_.reseed(seed);
  solved_ = false;
  episode_done_ = false;
  t_ = 0;
  state_ = initial_state(rng_);
  return {state_, JointObs::full_state(state_, spec_.n_agents)};
}

StepResult Env::step(const JointAction& action) {
  if (episode_done_) throw ContractViolation("Env::step: episode already done");
  if (action.size() != spec_.n_agents)
    throw ContractViolation("Env::step: joint action length mismatch");
  for (int i = 0; i < action.size(); ++i)
    if (action[i] < 0 || action[i] >= spec_.action_count)
      throw ContractViolation("Env::step: action index out of range");

  const double reward = advance(action);
  ++t_;
  const bool done = solved_ || t_ >= spec_.horizon;
  episode_done_ = done;
  return {state_, JointObs::full_state(state_, spec_.n_agents), reward, done};
}

// --- Pass ---

class PassEnv final : public Env {
 public:
  explicit PassEnv(TaskSpec spec) : Env(spec) {}

  static constexpr int kWallX = 14;   // crossing 14 <-> 15
  static constexpr int kDoorY = 15;
  static constexpr Pos kSwitchL{7, 15};
  static constexpr Pos kSwitchR{22, 15};

 protected:
  EnvState initial_state(Rng&) override {
    a_[0] = {1, 14};
    a_[1] = {1, 16};
    door_ = false;
    rings_[0] = {15, kDoorY, 3, 5, 0};  // door
    rings_[1] = {kSwitchR.x, kSwitchR.y, 3, 5, 0};
    return encode();
  }

  double advance(const JointAction& act) override {
    for (int i = 0; i < 2; ++i) move(a_[i], act[i]);
    door_ = occupied(kSwitchL) || occupied(kSwitchR);

    double reward = 0.0;
    if (spec_.reward_mode == RewardMode::kDense && door_)
      for (auto& ring : rings_)
        for (const auto& p : a_) reward += ring.claim(p.x, p.y);

    if (a_[0].x > kWallX && a_[1].x > kWallX) {
      solved_ = true;
      reward += 1.0;
    }
    state_ = encode();
    return reward;
  }

 private:
  void move(Pos& p, int action) {
    int nx = std::clamp(p.x + kDx[action], 0, spec_.grid_size - 1);
    int ny = std::clamp(p.y + kDy[action], 0, spec_.grid_size - 1);
    const bool crosses = (p.x <= kWallX) != (nx <= kWallX);
    if (crosses && !(door_ && p.y == kDoorY && ny == kDoorY)) return;
    p.x = nx;
    p.y = ny;
  }

  bool occupied(Pos s) const {
    return (a_[0].x == s.x && a_[0].y == s.y) || (a_[1].x == s.x && a_[1].y == s.y);
  }

  EnvState encode() const {
    return {a_[0].x, a_[0].y, a_[1].x, a_[1].y, door_ ? 1 : 0};
  }

  Pos a_[2];
  bool door_ = false;
  RingSet rings_[2];
};

// --- Secret-Room ---

class SecretRoomEnv final : public Env {
 public:
  explicit SecretRoomEnv(TaskSpec spec) : Env(spec) {}

  static constexpr int kWallX = 16;  // crossing 16 <-> 17
  static constexpr int kDoorY[3] = {4, 12, 20};
  static constexpr Pos kSwitchLarge{2, 12};
  static constexpr Pos kSwitchSmall[3] = {{21, 3}, {21, 12}, {21, 21}};
  static constexpr int kTargetRoom = 1;

  // Small-room index of a y coordinate.
  static int room_of(int y) { return y <= 7 ? 0 : (y <= 16 ? 1 : 2); }

 protected:
  EnvState initial_state(Rng&) override {
    a_[0] = {1, 11};
    a_[1] = {1, 13};
    doors_[0] = doors_[1] = doors_[2] = false;
    rings_[0] = {kWallX + 1, kDoorY[kTargetRoom], 3, 5, 0};  // target door
    rings_[1] = {kSwitchSmall[kTargetRoom].x, kSwitchSmall[kTargetRoom].y, 3, 5, 0};
    return encode();
  }

  double advance(const JointAction& act) override {
    for (int i = 0; i < 2; ++i) move(a_[i], act[i]);
    const bool large = occupied(kSwitchLarge);
    for (int d = 0; d < 3; ++d) doors_[d] = large || occupied(kSwitchSmall[d]);

    double reward = 0.0;
    if (spec_.reward_mode == RewardMode::kDense && doors_[kTargetRoom])
      for (auto& ring : rings_)
        for (const auto& p : a_) reward += ring.claim(p.x, p.y);

    if (in_target(a_[0]) && in_target(a_[1])) {
      solved_ = true;
      reward += 1.0;
    }
    state_ = encode();
    return reward;
  }

 private:
  void move(Pos& p, int action) {
    int nx = std::clamp(p.x + kDx[action], 0, spec_.grid_size - 1);
    int ny = std::clamp(p.y + kDy[action], 0, spec_.grid_size - 1);
    const bool crosses_wall = (p.x <= kWallX) != (nx <= kWallX);
    if (crosses_wall) {
      const int room = room_of(p.y);
      if (!(doors_[room] && p.y == kDoorY[room] && ny == kDoorY[room])) return;
    }
    // Solid partitions between small rooms.
    if (p.x > kWallX && room_of(p.y) != room_of(ny)) return;
    p.x = nx;
    p.y = ny;
  }

  bool occupied(Pos s) const {
    return (a_[0].x == s.x && a_[0].y == s.y) || (a_[1].x == s.x && a_[1].y == s.y);
  }

  bool in_target(Pos p) const { return p.x > kWallX && room_of(p.y) == kTargetRoom; }

  EnvState encode() const {
    return {a_[0].x, a_[0].y, a_[1].x, a_[1].y,
            doors_[0] ? 1 : 0, doors_[1] ? 1 : 0, doors_[2] ? 1 : 0};
  }

  Pos a_[2];
  bool doors_[3] = {false, false, false};
  RingSet rings_[2];
};

// --- Push-Box ---

class PushBoxEnv final : public Env {
 public:
  explicit PushBoxEnv(TaskSpec spec) : Env(spec) {}

 protected:
  EnvState initial_state(Rng&) override {
    a_[0] = {5, 6};
    a_[1] = {5, 8};
    box_ = {7, 7};
    claimed_ = 0;
    return encode();
  }

  double advance(const JointAction& act) override {
    // Box first: both agents adjacent, same direction, target in bounds and
    // not under an agent.
    const int g = spec_.grid_size;
    if (act[0] == act[1] && act[0] >= 1 && act[0] <= 4 && adjacent(a_[0]) && adjacent(a_[1])) {
      const int bx = box_.x + kDx[act[0]];
      const int by = box_.y + kDy[act[0]];
      const bool in_bounds = bx >= 0 && bx < g && by >= 0 && by < g;
      const bool blocked = (a_[0].x == bx && a_[0].y == by) || (a_[1].x == bx && a_[1].y == by);
      if (in_bounds && !blocked) box_ = {bx, by};
    }
    for (int i = 0; i < 2; ++i) move(a_[i], act[i]);

    double reward = 0.0;
    if (spec_.reward_mode == RewardMode::kDense) reward += claim_checkpoints();

    if (wall_distance() == 0) {
      solved_ = true;
      reward += 1.0;
    }
    state_ = encode();
    return reward;
  }

 private:
  bool adjacent(Pos p) const {
    return std::abs(p.x - box_.x) + std::abs(p.y - box_.y) == 1;
  }

  void move(Pos& p, int action) {
    int nx = std::clamp(p.x + kDx[action], 0, spec_.grid_size - 1);
    int ny = std::clamp(p.y + kDy[action], 0, spec_.grid_size - 1);
    if (nx == box_.x && ny == box_.y) return;  // box occupies its cell
    p.x = nx;
    p.y = ny;
  }

  int wall_distance() const {
    const int g = spec_.grid_size - 1;
    return std::min(std::min(box_.x, g - box_.x), std::min(box_.y, g - box_.y));
  }

  // Bands on the box's distance to the nearest wall; +0.1 the first time the
  // box reaches distance <= 6, <= 5, ... <= 1.
  double claim_checkpoints() {
    double reward = 0.0;
    const int d = wall_distance();
    for (int threshold = 6; threshold >= 1; --threshold) {
      const uint32_t bit = 1u << threshold;
      if (d <= threshold && !(claimed_ & bit)) {
        claimed_ |= bit;
        reward += kCheckpointReward;
      }
    }
    return reward;
  }

  EnvState encode() const {
    return {a_[0].x, a_[0].y, a_[1].x, a_[1].y, box_.x, box_.y};
  }

  Pos a_[2];
  Pos box_;
  uint32_t claimed_ = 0;
};

// --- Island ---

class IslandEnv final : public Env {
 public:
  explicit IslandEnv(TaskSpec spec) : Env(spec) {}

  static constexpr int kAttack = 5;
  static constexpr int kWolfEnergy = 8;
  static constexpr int kAgentEnergy = 5;

 protected:
  EnvState initial_state(Rng&) override {
    a_[0] = {1, 1};
    a_[1] = {8, 1};
    wolf_ = {5, 5};
    wolf_energy_ = kWolfEnergy;
    energy_[0] = energy_[1] = kAgentEnergy;
    return encode();
  }

  double advance(const JointAction& act) override {
    const bool dense = spec_.reward_mode == RewardMode::kDense;
    double reward = 0.0;

    int damage = 0;
    for (int i = 0; i < 2; ++i) {
      if (energy_[i] == 0) continue;  // inert
      if (act[i] == kAttack) {
        if (cheb(a_[i].x, a_[i].y, wolf_.x, wolf_.y) <= 1) ++damage;
      } else {
        move(a_[i], act[i]);
      }
    }
    damage = std::min(damage, wolf_energy_);
    wolf_energy_ -= damage;
    if (dense) reward += 1.0 * damage;

    if (wolf_energy_ == 0) {
      solved_ = true;
      reward += 1.0;
      if (dense) reward += 300.0;
    } else {
      wolf_act();
    }
    state_ = encode();
    return reward;
  }

 private:
  void move(Pos& p, int action) {
    int nx = std::clamp(p.x + kDx[action], 0, spec_.grid_size - 1);
    int ny = std::clamp(p.y + kDy[action], 0, spec_.grid_size - 1);
    if (nx == wolf_.x && ny == wolf_.y) return;  // wolf blocks the cell
    p.x = nx;
    p.y = ny;
  }

  void wolf_act() {
    // Attack an adjacent living agent (lowest index), otherwise walk one
    // cell toward the nearest living agent.
    int target = -1;
    int best = 1 << 20;
    for (int i = 0; i < 2; ++i) {
      if (energy_[i] == 0) continue;
      if (cheb(a_[i].x, a_[i].y, wolf_.x, wolf_.y) <= 1) {
        --energy_[i];
        return;
      }
      const int dist = std::abs(a_[i].x - wolf_.x) + std::abs(a_[i].y - wolf_.y);
      if (dist < best) {
        best = dist;
        target = i;
      }
    }
    if (target < 0) return;  // no living agents
    const int dx = a_[target].x - wolf_.x;
    const int dy = a_[target].y - wolf_.y;
    if (std::abs(dx) >= std::abs(dy) && dx != 0)
      wolf_.x += dx > 0 ? 1 : -1;
    else if (dy != 0)
      wolf_.y += dy > 0 ? 1 : -1;
  }

  EnvState encode() const {
    return {a_[0].x, a_[0].y, a_[1].x, a_[1].y,
            wolf_.x, wolf_.y, wolf_energy_, energy_[0], energy_[1]};
  }

  Pos a_[2];
  Pos wolf_;
  int wolf_energy_ = kWolfEnergy;
  int energy_[2] = {kAgentEnergy, kAgentEnergy};
};

// --- matrix game ---

class MatrixGameEnv final : public Env {
 public:
  MatrixGameEnv(TaskSpec spec, PayoffTable payoff)
      : Env(spec), payoff_(std::move(payoff)) {}

 protected:
  EnvState initial_state(Rng&) override { return {0}; }

  double advance(const JointAction& act) override {
    const double payoff = payoff_.at(act[0], act[1]);
    solved_ = payoff == payoff_.max_value();
    return payoff;
  }

 private:
  PayoffTable payoff_;
};

std::unique_ptr<Env> make_env(const TaskSpec& spec) {
  switch (spec.name) {
    case Task::kPass: return std::make_unique<PassEnv>(spec);
    case Task::kSecretRoom: return std::make_unique<SecretRoomEnv>(spec);
    case Task::kPushBox: return std::make_unique<PushBoxEnv>(spec);
    case Task::kIsland: return std::make_unique<IslandEnv>(spec);
    case Task::kMatrixGame:
      return std::make_unique<MatrixGameEnv>(spec, PayoffTable::identity(spec.action_count));
  }
  throw ConfigError("make_env: unknown task");
}

std::unique_ptr<Env> make_matrix_env(const PayoffTable& payoff, RewardMode mode) {
  TaskSpec spec = make_task_spec(Task::kMatrixGame, mode, 1, payoff.actions);
  return std::make_unique<MatrixGameEnv>(spec, payoff);
}

}  // namespace cmae
