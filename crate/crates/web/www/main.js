import init, { Demo, Params } from "./pkg/varroa_web.js";

const $ = (id) => document.getElementById(id);
let demo = null;

function params() {
  const p = new Params();
  p.diff_threshold = +$("diff").value;
  p.ir_gain = +$("gain").value;
  p.final_threshold = +$("final").value;
  p.opening_radius = +$("radius").value;
  p.cross = $("cross").checked;
  p.min_area = +$("area").value;
  return p;
}

function blit(canvas, rgba, w, h) {
  canvas.width = w;
  canvas.height = h;
  canvas.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function drawSweep(rows) {
  const c = $("sweep");
  const g = c.getContext("2d");
  const pad = 32;
  const pts = [];
  for (let i = 0; i < rows.length; i += 4) pts.push({ area: rows[i], fp: rows[i + 2], fn: rows[i + 3] });
  const maxA = Math.max(1, ...pts.map((p) => p.area));
  const maxY = Math.max(1, ...pts.map((p) => Math.max(p.fp, p.fn)));
  const x = (a) => pad + (a / maxA) * (c.width - 2 * pad);
  const y = (v) => c.height - pad - (v / maxY) * (c.height - 2 * pad);
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, c.width - 2 * pad, c.height - 2 * pad);
  g.fillStyle = "#444";
  g.fillText("0", pad - 12, c.height - pad + 4);
  g.fillText(String(maxY), 4, pad + 4);
  g.fillText(`min area (0..${maxA})`, c.width / 2 - 40, c.height - 8);
  for (const [key, color] of [["fp", "#ff2828"], ["fn", "#288cff"]]) {
    g.strokeStyle = color;
    g.beginPath();
    pts.forEach((p, i) => (i ? g.lineTo : g.moveTo).call(g, x(p.area), y(p[key])));
    g.stroke();
    g.fillStyle = color;
    g.fillText(key.toUpperCase(), c.width - pad + 4, y(pts[pts.length - 1][key]) + 4);
  }
  const a = +$("area").value;
  g.strokeStyle = "#0a0";
  g.beginPath();
  g.moveTo(x(Math.min(a, maxA)), pad);
  g.lineTo(x(Math.min(a, maxA)), c.height - pad);
  g.stroke();
}

function refresh({ sweep = true } = {}) {
  if (!demo) return;
  $("error").textContent = "";
  try {
    const p = params();
    const w = demo.width(), h = demo.height();
    const layer = $("layer").value;
    const d = demo.detect(p);
    blit($("view"), layer === "overlay" ? d.overlay() : demo.layer(layer), w, h);
    const recall = d.recall();
    $("counts").textContent =
      `${demo.captureId()}  (${demo.miteCount()} mites planted)\n` +
      `TP=${d.tp()}  FP=${d.fp()}  FN=${d.fn()}  TN=0\n` +
      `recall = ${Number.isNaN(recall) ? "undefined" : recall.toFixed(4)}\n` +
      `regions: ${Array.from(d.areas()).join(", ") || "none"}`;
    d.free();
    if (sweep) drawSweep(demo.sweep(p, 80, 2));
    p.free();
  } catch (e) {
    $("error").textContent = String(e);
  }
}

function generate() {
  try {
    if (demo) demo.free();
    demo = new Demo(+$("seed").value >>> 0, $("difficulty").value);
    refresh();
  } catch (e) {
    demo = null;
    $("error").textContent = String(e);
  }
}

for (const input of document.querySelectorAll("input[type=range]")) {
  const out = input.nextElementSibling;
  const show = () => (out.textContent = input.value);
  show();
  input.addEventListener("input", () => {
    show();
    refresh();
  });
}
$("cross").addEventListener("change", () => refresh());
$("layer").addEventListener("change", () => refresh({ sweep: false }));
$("generate").addEventListener("click", generate);
$("seed").addEventListener("change", generate);
$("difficulty").addEventListener("change", generate);

await init();
generate();
