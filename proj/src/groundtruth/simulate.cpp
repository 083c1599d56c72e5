#include "figsim/groundtruth/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "figsim/error.hpp"

namespace figsim {
namespace {

struct Mat33 {
  double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};

  static Mat33 zero() { return {}; }

  Vec3 mul(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat33 inverse() const {
    const double a = m[0], b = m[1], c = m[2], d = m[3], e = m[4], f = m[5], g = m[6], h = m[7],
                 i = m[8];
    const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    if (std::fabs(det) < 1e-300) throw InvalidSpec("singular inertia tensor");
    const double s = 1.0 / det;
    Mat33 r;
    r.m[0] = (e * i - f * h) * s;
    r.m[1] = (c * h - b * i) * s;
    r.m[2] = (b * f - c * e) * s;
    r.m[3] = (f * g - d * i) * s;
    r.m[4] = (a * i - c * g) * s;
    r.m[5] = (c * d - a * f) * s;
    r.m[6] = (d * h - e * g) * s;
    r.m[7] = (b * g - a * h) * s;
    r.m[8] = (a * e - b * d) * s;
    return r;
  }
};

Mat33 rotation_matrix(const Quat& q) {
  Mat33 r;
  const Vec3 cx = q.rotate({1, 0, 0});
  const Vec3 cy = q.rotate({0, 1, 0});
  const Vec3 cz = q.rotate({0, 0, 1});
  r.m[0] = cx.x;
  r.m[3] = cx.y;
  r.m[6] = cx.z;
  r.m[1] = cy.x;
  r.m[4] = cy.y;
  r.m[7] = cy.z;
  r.m[2] = cz.x;
  r.m[5] = cz.y;
  r.m[8] = cz.z;
  return r;
}

Mat33 similarity(const Mat33& r, const Mat33& a) {
  // R * A * R^T
  Mat33 ra;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r.m[3 * i + k] * a.m[3 * k + j];
      ra.m[3 * i + j] = s;
    }
  }
  Mat33 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += ra.m[3 * i + k] * r.m[3 * j + k];
      out.m[3 * i + j] = s;
    }
  }
  return out;
}

struct Body {
  const SceneObject* obj = nullptr;
  bool dynamic = false;
  double mass = 0.0;
  Vec3 com_body;     // vertex mean in the reference frame
  Mat33 inertia_inv_body;
  bool is_sphere = false;
  double radius = 0.0;

  Quat q;
  Vec3 com;
  Vec3 v;
  Vec3 w;

  Mat33 inertia_inv_world() const {
    if (!dynamic) return Mat33::zero();
    return similarity(rotation_matrix(q), inertia_inv_body);
  }

  double inv_mass() const { return dynamic ? 1.0 / mass : 0.0; }

  Vec3 point_velocity(const Vec3& p) const { return v + w.cross(p - com); }

  RigidTransform pose() const {
    RigidTransform t;
    t.rotation = q;
    t.translation = com - q.rotate(com_body);
    return t;
  }
};

Body make_body(const SceneObject& obj, const BodyInit& init) {
  Body b;
  b.obj = &obj;
  b.dynamic = !obj.props.static_flag && obj.props.mass > 0.0;
  b.mass = obj.props.mass;
  const auto& verts = obj.ref_mesh.vertices;
  if (verts.empty()) throw InvalidSpec("simulate: object without vertices");
  for (const Vec3& p : verts) b.com_body += p;
  b.com_body = (1.0 / double(verts.size())) * b.com_body;

  if (b.dynamic) {
    // point masses at the vertices
    const double mp = b.mass / double(verts.size());
    Mat33 inertia;
    for (const Vec3& p : verts) {
      const Vec3 r = p - b.com_body;
      const double rr = r.dot(r);
      inertia.m[0] += mp * (rr - r.x * r.x);
      inertia.m[4] += mp * (rr - r.y * r.y);
      inertia.m[8] += mp * (rr - r.z * r.z);
      inertia.m[1] -= mp * r.x * r.y;
      inertia.m[3] -= mp * r.x * r.y;
      inertia.m[2] -= mp * r.x * r.z;
      inertia.m[6] -= mp * r.x * r.z;
      inertia.m[5] -= mp * r.y * r.z;
      inertia.m[7] -= mp * r.y * r.z;
    }
    b.inertia_inv_body = inertia.inverse();
  }

  double rmin = std::numeric_limits<double>::max(), rmax = 0.0;
  for (const Vec3& p : verts) {
    const double r = (p - b.com_body).norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  b.radius = rmax;
  b.is_sphere = verts.size() >= 12 && (rmax - rmin) < 1e-6 * rmax;

  b.q = init.pose.rotation.normalized();
  b.com = init.pose.apply(b.com_body);
  b.v = init.velocity;
  b.w = init.angular_velocity;
  return b;
}

struct Contact {
  Body* a = nullptr;  // pushed along +normal
  Body* b = nullptr;  // nullptr = floor/world
  Vec3 point;
  Vec3 normal;
};

//! One impulse with restitution and a Coulomb-clamped tangential component.
//! Returns true if an impulse was applied.
bool resolve(const Contact& c, double rest_threshold, double gravity_dt) {
  Body& a = *c.a;
  Body* b = c.b;
  const Vec3 n = c.normal;
  const Vec3 ua = a.point_velocity(c.point);
  const Vec3 ub = b ? b->point_velocity(c.point) : Vec3{};
  const Vec3 u = ua - ub;
  const double un = u.dot(n);
  if (un >= -1e-12) return false;

  // approach speed before this step's gravity kick; reflecting the kicked
  // velocity would let bounces gain energy
  const double dyn_diff = (a.dynamic ? 1.0 : 0.0) - (b && b->dynamic ? 1.0 : 0.0);
  const double un0 = un + gravity_dt * n.z * dyn_diff;

  const Mat33 ia = a.inertia_inv_world();
  const Mat33 ib = b ? b->inertia_inv_world() : Mat33::zero();
  const Vec3 ra = c.point - a.com;
  const Vec3 rb = b ? c.point - b->com : Vec3{};
  auto denom = [&](const Vec3& dir) {
    double k = a.inv_mass() + (b ? b->inv_mass() : 0.0);
    k += dir.dot(ia.mul(ra.cross(dir)).cross(ra));
    if (b) k += dir.dot(ib.mul(rb.cross(dir)).cross(rb));
    return k;
  };

  double e = b ? std::min(a.obj->props.restitution, b->obj->props.restitution)
               : a.obj->props.restitution;
  if (-un0 < rest_threshold) e = 0.0;
  const double jn = (-e * std::min(un0, 0.0) - un) / denom(n);

  double mu = b ? std::min(a.obj->props.friction, b->obj->props.friction)
                : a.obj->props.friction;
  Vec3 impulse = jn * n;
  const Vec3 ut = u - un * n;
  if (ut.norm() > 1e-12 && mu > 0.0) {
    const Vec3 t = ut.normalized();
    double jt = -ut.norm() / denom(t);
    jt = std::clamp(jt, -mu * jn, mu * jn);
    impulse += jt * t;
  }

  if (a.dynamic) {
    a.v += a.inv_mass() * impulse;
    a.w += ia.mul(ra.cross(impulse));
  }
  if (b && b->dynamic) {
    b->v += -b->inv_mass() * impulse;
    b->w += ib.mul(rb.cross(-impulse));
  }
  return true;
}

//! Deepest vertex of `a` inside convex `b` (world-space vertices/faces).
//! Returns depth > 0 with the face normal of b at the deepest face.
bool deepest_vertex_in_convex(const std::vector<Vec3>& averts, const TriMesh& bmesh,
                              const std::vector<Vec3>& bverts, double& depth, Vec3& point,
                              Vec3& normal) {
  bool found = false;
  depth = 0.0;
  for (const Vec3& p : averts) {
    double max_sd = -std::numeric_limits<double>::max();
    Vec3 best_n;
    bool outside = false;
    for (size_t f = 0; f < bmesh.faces.size(); ++f) {
      const auto& t = bmesh.faces[f];
      const Vec3 fn =
          (bverts[t[1]] - bverts[t[0]]).cross(bverts[t[2]] - bverts[t[0]]).normalized();
      const double sd = fn.dot(p - bverts[t[0]]);
      if (sd > 1e-12) {
        outside = true;
        break;
      }
      if (sd > max_sd) {
        max_sd = sd;
        best_n = fn;
      }
    }
    if (outside) continue;
    const double d = -max_sd;
    if (d > depth) {
      depth = d;
      point = p;
      normal = best_n;
      found = true;
    }
  }
  return found;
}

}  // namespace

Trajectory simulate(const SceneSpec& spec) {
  if (spec.initial.size() != spec.scene.objects.size()) {
    throw InvalidSpec("simulate: one initial state per object required");
  }
  if (spec.dt <= 0.0 || spec.steps < 0) throw InvalidSpec("simulate: bad dt or step count");

  std::vector<Body> bodies;
  bodies.reserve(spec.scene.objects.size());
  for (size_t i = 0; i < spec.scene.objects.size(); ++i) {
    bodies.push_back(make_body(spec.scene.objects[i], spec.initial[i]));
  }
  for (const Body& b : bodies) {
    if (!b.dynamic) continue;
    double minz = std::numeric_limits<double>::max();
    for (const Vec3& p : b.obj->ref_mesh.vertices) minz = std::min(minz, b.pose().apply(p).z);
    if (minz < -1e-9) throw InvalidSpec("simulate: initial floor interpenetration");
  }

  const double dt = spec.dt;
  const double rest_threshold = 2.0 * spec.gravity * dt;

  Trajectory traj;
  traj.scene = spec.scene;
  traj.dt = dt;
  traj.gravity = spec.gravity;

  auto record = [&] {
    FrameState frame;
    std::vector<BodyKinematics> kin;
    for (const Body& b : bodies) {
      ObjectState s;
      s.pose = b.pose();
      s.vertices.reserve(b.obj->ref_mesh.vertices.size());
      for (const Vec3& p : b.obj->ref_mesh.vertices) s.vertices.push_back(s.pose.apply(p));
      frame.objects.push_back(std::move(s));
      kin.push_back({b.v, b.w});
    }
    traj.frames.push_back(std::move(frame));
    traj.kinematics.push_back(std::move(kin));
  };
  record();

  std::vector<std::vector<Vec3>> world(bodies.size());

  for (int step = 0; step < spec.steps; ++step) {
    for (Body& b : bodies) {
      if (b.dynamic) b.v.z -= spec.gravity * dt;
    }

    for (size_t i = 0; i < bodies.size(); ++i) {
      world[i].clear();
      const RigidTransform pose = bodies[i].pose();
      for (const Vec3& p : bodies[i].obj->ref_mesh.vertices) world[i].push_back(pose.apply(p));
    }

    bool any_impulse = false;
    for (int iter = 0; iter < 20; ++iter) {
      bool applied = false;

      // floor: deepest predicted-penetrating vertex per body
      for (size_t i = 0; i < bodies.size(); ++i) {
        Body& b = bodies[i];
        if (!b.dynamic) continue;
        double best = 0.0;
        Vec3 best_point;
        bool found = false;
        if (b.is_sphere) {
          // analytic lowest point; vertex sampling would bob as the ball rolls
          const Vec3 p = b.com - Vec3{0, 0, b.radius};
          const double zp = std::min(p.z, p.z + dt * b.point_velocity(p).z);
          if (zp < best) {
            best = zp;
            best_point = p;
            found = true;
          }
        } else {
          for (const Vec3& p : world[i]) {
            const double zp = std::min(p.z, p.z + dt * b.point_velocity(p).z);
            if (zp < best) {
              best = zp;
              best_point = p;
              found = true;
            }
          }
        }
        if (found) {
          Contact c{&b, nullptr, best_point, {0, 0, 1}};
          applied |= resolve(c, rest_threshold, spec.gravity * dt);
        }
      }

      // object-object
      for (size_t i = 0; i < bodies.size(); ++i) {
        for (size_t j = i + 1; j < bodies.size(); ++j) {
          Body& a = bodies[i];
          Body& b = bodies[j];
          if (!a.dynamic && !b.dynamic) continue;
          if (a.is_sphere && b.is_sphere) {
            const Vec3 ca = a.com + dt * a.v;
            const Vec3 cb = b.com + dt * b.v;
            if ((ca - cb).norm() < a.radius + b.radius) {
              const Vec3 d = a.com - b.com;
              const Vec3 n = d.norm() > 1e-12 ? d.normalized() : Vec3{0, 0, 1};
              const Vec3 point = b.com + (b.radius + 0.5 * (d.norm() - a.radius - b.radius)) * n;
              Contact c{&a, &b, point, n};
              applied |= resolve(c, rest_threshold, spec.gravity * dt);
            }
          } else {
            const double reach = a.radius + b.radius + dt * (a.v.norm() + b.v.norm());
            if ((a.com - b.com).norm() > reach) continue;
            double da = 0.0, db = 0.0;
            Vec3 pa, na, pb, nb;
            const bool ina =
                deepest_vertex_in_convex(world[i], b.obj->ref_mesh, world[j], da, pa, na);
            const bool inb =
                deepest_vertex_in_convex(world[j], a.obj->ref_mesh, world[i], db, pb, nb);
            if (ina && (!inb || da >= db)) {
              Contact c{&a, &b, pa, na};
              applied |= resolve(c, rest_threshold, spec.gravity * dt);
            } else if (inb) {
              Contact c{&b, &a, pb, nb};
              applied |= resolve(c, rest_threshold, spec.gravity * dt);
            }
          }
        }
      }

      any_impulse |= applied;
      if (!applied) break;
    }

    for (Body& b : bodies) {
      if (!b.dynamic) continue;
      b.com += dt * b.v;
      const Quat wq{0.0, b.w.x, b.w.y, b.w.z};
      const Quat dq = wq * b.q;
      b.q = Quat{b.q.w + 0.5 * dt * dq.w, b.q.x + 0.5 * dt * dq.x, b.q.y + 0.5 * dt * dq.y,
                 b.q.z + 0.5 * dt * dq.z}
                .normalized();
    }

    // positional projection: floor, then sphere-sphere separation
    for (Body& b : bodies) {
      if (!b.dynamic) continue;
      double minz;
      if (b.is_sphere) {
        minz = b.com.z - b.radius;
      } else {
        const RigidTransform pose = b.pose();
        minz = std::numeric_limits<double>::max();
        for (const Vec3& p : b.obj->ref_mesh.vertices) minz = std::min(minz, pose.apply(p).z);
      }
      if (minz < 0.0) b.com.z -= minz;
    }
    for (size_t i = 0; i < bodies.size(); ++i) {
      for (size_t j = i + 1; j < bodies.size(); ++j) {
        Body& a = bodies[i];
        Body& b = bodies[j];
        if (!a.is_sphere || !b.is_sphere) continue;
        const Vec3 d = a.com - b.com;
        const double overlap = a.radius + b.radius - d.norm();
        if (overlap <= 0.0 || d.norm() < 1e-12) continue;
        const Vec3 n = d.normalized();
        const double wa = a.inv_mass() / (a.inv_mass() + b.inv_mass() + 1e-300);
        a.com += overlap * wa * n;
        b.com += -overlap * (1.0 - wa) * n;
      }
    }

    traj.contact.push_back(any_impulse ? 1 : 0);
    record();
  }

  for (const FrameState& f : traj.frames) {
    for (const ObjectState& o : f.objects) {
      for (const Vec3& p : o.vertices) {
        if (!p.is_finite()) throw NonFiniteState("simulate: non-finite vertex");
      }
    }
  }
  return traj;
}

double mechanical_energy(const Trajectory& trajectory, int frame) {
  double e = 0.0;
  for (size_t i = 0; i < trajectory.scene.objects.size(); ++i) {
    const SceneObject& obj = trajectory.scene.objects[i];
    if (obj.props.static_flag || obj.props.mass <= 0.0) continue;
    const ObjectState& s = trajectory.frames[frame].objects[i];
    const BodyKinematics& k = trajectory.kinematics[frame][i];

    Vec3 com;
    for (const Vec3& p : s.vertices) com += p;
    com = (1.0 / double(s.vertices.size())) * com;

    e += 0.5 * obj.props.mass * k.velocity.dot(k.velocity);
    e += obj.props.mass * trajectory.gravity * com.z;

    // rotational term with point masses at the vertices
    const double mp = obj.props.mass / double(s.vertices.size());
    for (const Vec3& p : s.vertices) {
      const Vec3 u = k.angular_velocity.cross(p - com);
      e += 0.5 * mp * u.dot(u);
    }
  }
  return e;
}

}  // namespace figsim
