/**
 * Quaternion to Tait-Bryan yaw-pitch-roll (intrinsic Z-Y-X) conversion.
 * Quaternions are scalar-last [x, y, z, w], body-to-reference.
 */

export interface EulerAngles {
  yaw: number;
  pitch: number;
  roll: number;
}

export function quaternionToEuler(q: [number, number, number, number]): EulerAngles {
  const [x, y, z, w] = q;
  const norm = Math.hypot(x, y, z, w);
  const [nx, ny, nz, nw] = [x / norm, y / norm, z / norm, w / norm];
  const sinPitch = Math.max(-1, Math.min(1, 2 * (nw * ny - nz * nx)));
  return {
    yaw: Math.atan2(2 * (nw * nz + nx * ny), 1 - 2 * (ny * ny + nz * nz)),
    pitch: Math.asin(sinPitch),
    roll: Math.atan2(2 * (nw * nx + ny * nz), 1 - 2 * (nx * nx + ny * ny)),
  };
}

export const RAD_TO_DEG = 180 / Math.PI;
