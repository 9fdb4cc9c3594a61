package demo;

public class Joiner {
    public String showBug(String[] parts) {
        String out = "";
        int i = 0;
        while (i < parts.length) {
            out = out + parts[i];
            i++;
        }
        return out;
    }
}
