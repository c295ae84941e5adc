import { runFigure } from "../render.js";

runFigure("fig9");
