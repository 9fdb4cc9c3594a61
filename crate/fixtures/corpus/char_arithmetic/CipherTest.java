package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class CipherTest {
    @Test
    public void shiftsLetters() {
        assertEquals("def", new Cipher().showBug("abc"));
    }
}
