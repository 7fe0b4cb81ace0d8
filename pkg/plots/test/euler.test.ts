import { describe, expect, it } from "vitest";

import { quaternionToEuler, RAD_TO_DEG } from "../src/euler.js";

describe("quaternionToEuler", () => {
  it("maps the identity to zero angles", () => {
    const e = quaternionToEuler([0, 0, 0, 1]);
    expect(e.yaw).toBe(0);
    expect(e.pitch).toBe(0);
    expect(e.roll).toBe(0);
  });

  it("recovers a pure yaw", () => {
    const half = Math.PI / 6 / 2;
    const e = quaternionToEuler([0, 0, Math.sin(half), Math.cos(half)]);
    expect(e.yaw * RAD_TO_DEG).toBeCloseTo(30, 10);
    expect(e.pitch).toBeCloseTo(0, 12);
    expect(e.roll).toBeCloseTo(0, 12);
  });

  it("recovers a pure pitch and roll", () => {
    const half = 0.2 / 2;
    const pitch = quaternionToEuler([0, Math.sin(half), 0, Math.cos(half)]);
    expect(pitch.pitch).toBeCloseTo(0.2, 12);
    const roll = quaternionToEuler([Math.sin(half), 0, 0, Math.cos(half)]);
    expect(roll.roll).toBeCloseTo(0.2, 12);
  });

  it("composes intrinsic z-y-x in order", () => {
    // yaw 40deg then pitch 25deg then roll -60deg
    const [y, p, r] = [40, 25, -60].map((d) => (d / RAD_TO_DEG) / 2);
    const qz: [number, number, number, number] = [0, 0, Math.sin(y), Math.cos(y)];
    const qy: [number, number, number, number] = [0, Math.sin(p), 0, Math.cos(p)];
    const qx: [number, number, number, number] = [Math.sin(r), 0, 0, Math.cos(r)];
    const mul = (
      a: [number, number, number, number],
      b: [number, number, number, number]
    ): [number, number, number, number] => {
      const [ax, ay, az, aw] = a;
      const [bx, by, bz, bw] = b;
      return [
        aw * bx + bw * ax + ay * bz - az * by,
        aw * by + bw * ay + az * bx - ax * bz,
        aw * bz + bw * az + ax * by - ay * bx,
        aw * bw - ax * bx - ay * by - az * bz,
      ];
    };
    const q = mul(mul(qz, qy), qx);
    const e = quaternionToEuler(q);
    expect(e.yaw * RAD_TO_DEG).toBeCloseTo(40, 9);
    expect(e.pitch * RAD_TO_DEG).toBeCloseTo(25, 9);
    expect(e.roll * RAD_TO_DEG).toBeCloseTo(-60, 9);
  });
});
