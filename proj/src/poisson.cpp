#include "rch/poisson.hpp"

#include <utility>

#include "rch/errors.hpp"

namespace rch {

ProductPoint ProductPoint::so3(const Vec3& pi) {
  ProductPoint p;
  p.space = Space::SO3Dual;
  p.pi = pi;
  p.theta = VecX::Zero(0);
  p.ell = VecX::Zero(0);
  return p;
}

ProductPoint ProductPoint::se3(const SE3CoalgebraPoint& q) {
  ProductPoint p = so3(q.pi);
  p.space = Space::SE3Dual;
  p.gamma = q.gamma;
  return p;
}

ProductPoint ProductPoint::with_rotors(ProductPoint base, const VecX& theta, const VecX& ell) {
  if (theta.size() != ell.size()) {
    throw Error(ErrorKind::DimensionMismatch, "rotor angle and momentum sizes differ");
  }
  base.theta = theta;
  base.ell = ell;
  return base;
}

VecX ProductPoint::flat() const {
  VecX x(static_cast<Eigen::Index>(dim()));
  x.head<3>() = pi;
  Eigen::Index at = 3;
  if (space == Space::SE3Dual) {
    x.segment<3>(3) = gamma;
    at = 6;
  }
  const auto k = theta.size();
  x.segment(at, k) = theta;
  x.segment(at + k, k) = ell;
  return x;
}

ProductPoint ProductPoint::from_flat(Space space, std::size_t rotors, const VecX& x) {
  ProductPoint p;
  p.space = space;
  const auto k = static_cast<Eigen::Index>(rotors);
  if (static_cast<std::size_t>(x.size()) != p.lie_dim() + 2 * rotors) {
    throw Error(ErrorKind::DimensionMismatch, "flat vector has wrong length");
  }
  p.pi = x.head<3>();
  Eigen::Index at = 3;
  if (space == Space::SE3Dual) {
    p.gamma = x.segment<3>(3);
    at = 6;
  }
  p.theta = x.segment(at, k);
  p.ell = x.segment(at + k, k);
  return p;
}

Gradient Gradient::zero_like(const ProductPoint& p) {
  Gradient g;
  g.d_theta = VecX::Zero(p.theta.size());
  g.d_ell = VecX::Zero(p.ell.size());
  return g;
}

VecX Gradient::flat(Space space) const {
  ProductPoint p;
  p.space = space;
  p.pi = d_pi;
  p.gamma = d_gamma;
  p.theta = d_theta;
  p.ell = d_ell;
  return p.flat();
}

Gradient Gradient::from_flat(Space space, std::size_t rotors, const VecX& g) {
  const ProductPoint p = ProductPoint::from_flat(space, rotors, g);
  Gradient out;
  out.d_pi = p.pi;
  out.d_gamma = p.gamma;
  out.d_theta = p.theta;
  out.d_ell = p.ell;
  return out;
}

namespace fn {

SmoothFn coordinate(std::size_t j) {
  return {
      [j](const ProductPoint& p) { return p.flat()(static_cast<Eigen::Index>(j)); },
      [j](const ProductPoint& p) {
        VecX g = VecX::Zero(static_cast<Eigen::Index>(p.dim()));
        g(static_cast<Eigen::Index>(j)) = 1.0;
        return Gradient::from_flat(p.space, p.rotor_count(), g);
      }};
}

SmoothFn pi_component(int i) {
  return {[i](const ProductPoint& p) { return p.pi(i); },
          [i](const ProductPoint& p) {
            Gradient g = Gradient::zero_like(p);
            g.d_pi(i) = 1.0;
            return g;
          }};
}

SmoothFn gamma_component(int i) {
  return {[i](const ProductPoint& p) { return p.gamma(i); },
          [i](const ProductPoint& p) {
            Gradient g = Gradient::zero_like(p);
            g.d_gamma(i) = 1.0;
            return g;
          }};
}

SmoothFn rotor_angle(int i) {
  return {[i](const ProductPoint& p) { return p.theta(i); },
          [i](const ProductPoint& p) {
            Gradient g = Gradient::zero_like(p);
            g.d_theta(i) = 1.0;
            return g;
          }};
}

SmoothFn rotor_momentum(int i) {
  return {[i](const ProductPoint& p) { return p.ell(i); },
          [i](const ProductPoint& p) {
            Gradient g = Gradient::zero_like(p);
            g.d_ell(i) = 1.0;
            return g;
          }};
}

SmoothFn linear(const VecX& c, double offset) {
  return {[c, offset](const ProductPoint& p) { return c.dot(p.flat()) + offset; },
          [c](const ProductPoint& p) {
            return Gradient::from_flat(p.space, p.rotor_count(), c);
          }};
}

SmoothFn quadratic(const MatX& a, const VecX& b, double c) {
  const MatX s = 0.5 * (a + a.transpose());
  return {[s, b, c](const ProductPoint& p) {
            const VecX x = p.flat();
            return 0.5 * x.dot(s * x) + b.dot(x) + c;
          },
          [s, b](const ProductPoint& p) {
            const VecX x = p.flat();
            return Gradient::from_flat(p.space, p.rotor_count(), VecX(s * x + b));
          }};
}

SmoothFn constant(double c) {
  return {[c](const ProductPoint&) { return c; },
          [](const ProductPoint& p) { return Gradient::zero_like(p); }};
}

SmoothFn product(const SmoothFn& f, const SmoothFn& g) {
  return {[f, g](const ProductPoint& p) { return f(p) * g(p); },
          [f, g](const ProductPoint& p) {
            const double fv = f(p);
            const double gv = g(p);
            const Gradient df = f.grad(p);
            const Gradient dg = g.grad(p);
            Gradient out;
            out.d_pi = fv * dg.d_pi + gv * df.d_pi;
            out.d_gamma = fv * dg.d_gamma + gv * df.d_gamma;
            out.d_theta = fv * dg.d_theta + gv * df.d_theta;
            out.d_ell = fv * dg.d_ell + gv * df.d_ell;
            return out;
          }};
}

SmoothFn sum(const SmoothFn& f, const SmoothFn& g) {
  return {[f, g](const ProductPoint& p) { return f(p) + g(p); },
          [f, g](const ProductPoint& p) {
            Gradient out = f.grad(p);
            const Gradient dg = g.grad(p);
            out.d_pi += dg.d_pi;
            out.d_gamma += dg.d_gamma;
            out.d_theta += dg.d_theta;
            out.d_ell += dg.d_ell;
            return out;
          }};
}

}  // namespace fn

namespace {

double lie_term(const ProductPoint& p, const Gradient& df, const Gradient& dk, BracketSign sign) {
  double v = p.pi.dot(df.d_pi.cross(dk.d_pi));
  if (p.space == Space::SE3Dual) {
    v += p.gamma.dot(df.d_pi.cross(dk.d_gamma) - dk.d_pi.cross(df.d_gamma));
  }
  return sign_value(sign) * v;
}

double rotor_term(const Gradient& df, const Gradient& dk) {
  return df.d_theta.dot(dk.d_ell) - dk.d_theta.dot(df.d_ell);
}

}  // namespace

double bracket_from_gradients(const ProductPoint& p, const Gradient& df, const Gradient& dk,
                              BracketSign sign) {
  return lie_term(p, df, dk, sign) + rotor_term(df, dk);
}

double lp_bracket_so3(const SmoothFn& f, const SmoothFn& k, const Vec3& pi, BracketSign sign) {
  const ProductPoint p = ProductPoint::so3(pi);
  return lie_term(p, f.grad(p), k.grad(p), sign);
}

double lp_bracket_se3(const SmoothFn& f, const SmoothFn& k, const SE3CoalgebraPoint& q,
                      BracketSign sign) {
  const ProductPoint p = ProductPoint::se3(q);
  return lie_term(p, f.grad(p), k.grad(p), sign);
}

double bracket_rotor(const SmoothFn& f, const SmoothFn& k, const VecX& theta, const VecX& ell) {
  const ProductPoint p = ProductPoint::with_rotors(ProductPoint::so3(Vec3::Zero()), theta, ell);
  return rotor_term(f.grad(p), k.grad(p));
}

double bracket_product(const SmoothFn& f, const SmoothFn& k, const ProductPoint& p,
                       BracketSign sign) {
  return bracket_from_gradients(p, f.grad(p), k.grad(p), sign);
}

VecX bracket_vector_field(const SmoothFn& h, const ProductPoint& p) {
  const auto n = p.dim();
  const Gradient dh = h.grad(p);
  VecX out(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const SmoothFn xj = fn::coordinate(j);
    out(static_cast<Eigen::Index>(j)) = bracket_from_gradients(p, xj.grad(p), dh, BracketSign::Minus);
  }
  return out;
}

SE3CoalgebraPoint ham_vf_se3(const Vec3& grad_pi, const Vec3& grad_gamma,
                             const SE3CoalgebraPoint& p) {
  return {p.pi.cross(grad_pi) + p.gamma.cross(grad_gamma), p.gamma.cross(grad_pi)};
}

std::vector<SmoothFn> casimirs(Space space) {
  if (space == Space::SO3Dual) {
    return {{[](const ProductPoint& p) { return p.pi.squaredNorm(); },
             [](const ProductPoint& p) {
               Gradient g = Gradient::zero_like(p);
               g.d_pi = 2.0 * p.pi;
               return g;
             }}};
  }
  return {{[](const ProductPoint& p) { return p.gamma.squaredNorm(); },
           [](const ProductPoint& p) {
             Gradient g = Gradient::zero_like(p);
             g.d_gamma = 2.0 * p.gamma;
             return g;
           }},
          {[](const ProductPoint& p) { return p.pi.dot(p.gamma); },
           [](const ProductPoint& p) {
             Gradient g = Gradient::zero_like(p);
             g.d_pi = p.gamma;
             g.d_gamma = p.pi;
             return g;
           }}};
}

}  // namespace rch
